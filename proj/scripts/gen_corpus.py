#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Generate the bulk of the scenario corpus under data/corpus/.

Deterministic (no RNG): running it twice produces identical files.  The six
hand-written fixture scenarios are left untouched; everything else in the
corpus comes from here.  Run from the repository root:

    python3 scripts/gen_corpus.py
"""

import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "corpus"

FS_TOOLS = ["ls", "cd", "find", "grep", "rm", "rmdir", "cp", "mv"]
TRAVEL_TOOLS = [
    "list_all_airports", "get_nearest_airport_by_city", "get_flight_cost",
    "book_flight", "cancel_booking", "get_zipcode_based_on_city",
    "estimate_distance", "travel_get_login_status",
]
SOCIAL_TOOLS = ["authenticate_twitter", "post_tweet", "retweet", "get_user_tweets"]
VEHICLE_TOOLS = [
    "fillFuelTank", "lockDoors", "startEngine", "pressBrakePedal", "mean",
    "estimate_drive_feasibility_by_mileage",
]
DOMAIN_TOOLS = {
    "filesystem": FS_TOOLS,
    "travel": TRAVEL_TOOLS,
    "social": SOCIAL_TOOLS,
    "vehicle": VEHICLE_TOOLS,
}


def tools_for(domains, minus=(), plus=()):
    out = []
    for d in domains:
        out += DOMAIN_TOOLS[d]
    out = [t for t in out if t not in minus]
    out += [t for t in plus if t not in out]
    return out


def call(fn, /, **args):
    return {"name": fn, "arguments": args}


def turn(text, gt=(), expect=None, tools=None, inject=None, blobs=None):
    t = {"user_text": text}
    if tools is not None:
        t["available_tools"] = tools
    if inject:
        t["injected_tools"] = inject
    t["ground_truth_calls"] = list(gt)
    if expect:
        t["expected_returns"] = {str(k): v for k, v in expect.items()}
    if blobs:
        t["distractor_blobs"] = blobs
    return t


def travel_state(**kw):
    st = {
        "airports": [], "nearest_airport": {}, "zipcodes": {}, "flight_costs": {},
        "distances": {}, "access_token": "", "logged_in": False, "cards": {},
        "bookings": {}, "next_booking_id": 1, "next_transaction_id": 1,
    }
    st.update(kw)
    return st


def social_state(**kw):
    st = {"authenticated": False, "username": "", "tweets": {}, "next_tweet_id": 0,
          "retweets": {}}
    st.update(kw)
    return st


def vehicle_state(**kw):
    st = {
        "fuel_level": 0.0, "tank_capacity": 50.0,
        "doors_locked": {"driver": False, "passenger": False,
                         "rear_left": False, "rear_right": False},
        "brake_pedal": 0.0, "engine_running": False, "mpg": 20.0,
        "battery_voltage": 12.6,
    }
    st.update(kw)
    return st


def tweet(tid, user, content, tags=(), mentions=()):
    return {"id": tid, "username": user, "content": content,
            "tags": list(tags), "mentions": list(mentions)}


BULLETIN = [
    "Reminder: the quarterly all-hands moved to Thursday at 10am in the main atrium.",
    "The cafeteria menu now rotates weekly; feedback goes to the facilities inbox.",
    "Parking garage level two is closed for resurfacing until further notice.",
    "IT will retire the legacy VPN gateway at the end of the month.",
    "The wellness committee is looking for volunteers to staff the fun run.",
    "Printer firmware updates roll out tonight; expect a brief outage on floor two.",
    "Badge readers in the annex were replaced; tap twice if the light stays red.",
    "The library cart on floor three has new arrivals every Monday morning.",
]


def blob(tag, k):
    """One distractor blob of at least 4096 bytes, deterministic per (tag, k)."""
    lines = [f"[forwarded bulletin {tag}-{k}; none of this affects your task]"]
    i = k * 7
    while sum(len(line) + 1 for line in lines) < 4200:
        lines.append(f"item {i:03d}: {BULLETIN[i % len(BULLETIN)]}")
        i += 1
    return "\n".join(lines)


def scenario(sid, split, domains, initial_state, turns, credentials=None):
    return {
        "id": sid, "split": split, "domains": domains,
        "credentials": credentials or {},
        "initial_state": initial_state, "turns": turns,
    }


SCENARIOS = []


def add(sc):
    SCENARIOS.append(sc)


# ---------------------------------------------------------------------------
# base

add(scenario(
    "fs-archive-sort", "base", ["filesystem"],
    {"filesystem": {"root": {
        "Projects": {"alpha_notes.txt": "alpha draft one",
                     "beta_notes.txt": "beta summary",
                     "archive": {"old_log.txt": "archived"}},
        "readme.md": "top level readme"}, "cwd": "/"}},
    [
        turn("Go into the Projects folder and list everything in it, including "
             "any hidden entries.",
             gt=[call("cd", folder="Projects"), call("ls", a=True)],
             expect={0: {"current_working_directory": "/Projects"},
                     1: {"current_directory_content":
                         ["alpha_notes.txt", "archive", "beta_notes.txt"]}},
             tools=tools_for(["filesystem"])),
        turn("Rename beta_notes.txt to beta_final.txt.",
             gt=[call("mv", source="beta_notes.txt", destination="beta_final.txt")],
             expect={0: {"result": "'beta_notes.txt' moved to 'beta_final.txt'"}}),
        turn("Copy alpha_notes.txt into the archive folder, then go in there and "
             "list its contents.",
             gt=[call("cp", source="alpha_notes.txt", destination="archive"),
                 call("cd", folder="archive"), call("ls")],
             expect={0: {"result": "'alpha_notes.txt' copied to 'archive'"},
                     1: {"current_working_directory": "/Projects/archive"},
                     2: {"current_directory_content": ["alpha_notes.txt", "old_log.txt"]}}),
    ]))

add(scenario(
    "fs-log-audit", "base", ["filesystem"],
    {"filesystem": {"root": {
        "logs": {"app.log": "error: disk full\ninfo: service started\n"
                            "error: timeout reached\ninfo: shutdown",
                 "metrics.csv": "cpu,90\nmem,70"},
        "notes.txt": "remember to rotate the records"}, "cwd": "/"}},
    [
        turn("Change into logs and show me every line of app.log that mentions "
             "'error'.",
             gt=[call("cd", folder="logs"), call("grep", file_name="app.log", pattern="error")],
             expect={0: {"current_working_directory": "/logs"},
                     1: {"matching_lines": ["error: disk full", "error: timeout reached"]}},
             tools=tools_for(["filesystem"])),
        turn("Go back up and search the whole tree for anything with 'log' in "
             "its name.",
             gt=[call("cd", folder=".."), call("find", name="log")],
             expect={0: {"current_working_directory": "/"},
                     1: {"matches": ["/logs", "/logs/app.log"]}}),
        turn("We don't need metrics.csv any more. Go into logs and delete it.",
             gt=[call("cd", folder="logs"), call("rm", file_name="metrics.csv")],
             expect={0: {"current_working_directory": "/logs"},
                     1: {"result": "'metrics.csv' removed."}}),
    ]))

add(scenario(
    "travel-status-quote", "base", ["travel"],
    {"travel": travel_state(
        airports=["SEA", "SFO", "DEN"],
        flight_costs={"SEA|SFO|2024-09-10|economy": 210.0,
                      "SEA|DEN|2024-09-10|business": 540.0},
        access_token="tok-sea-1", logged_in=True, cards={"c_88": 5000.0},
        next_booking_id=5001, next_transaction_id=9001)},
    [
        turn("Before anything else, confirm that I'm logged in to the travel "
             "service.",
             gt=[call("travel_get_login_status")],
             expect={0: {"status": True}},
             tools=tools_for(["travel"])),
        turn("Quote me SEA to SFO in economy on 2024-09-10, and also SEA to "
             "DEN in business for the same date.",
             gt=[call("get_flight_cost", travel_from="SEA", travel_to="SFO",
                      travel_date="2024-09-10", travel_class="economy"),
                 call("get_flight_cost", travel_from="SEA", travel_to="DEN",
                      travel_date="2024-09-10", travel_class="business")],
             expect={0: {"travel_cost_list": [210.0]},
                     1: {"travel_cost_list": [540.0]}}),
        turn("Book the Denver flight with my saved card.",
             gt=[call("book_flight", access_token="tok-sea-1", card_id="c_88",
                      travel_date="2024-09-10", travel_from="SEA", travel_to="DEN",
                      travel_class="business", travel_cost=540.0)],
             expect={0: {"booking_id": "5001", "transaction_id": "9001",
                         "booking_status": True}}),
        turn("Out of curiosity, which airports do you know about?",
             gt=[call("list_all_airports")],
             expect={0: ["SEA", "SFO", "DEN"]}),
    ],
    credentials={"access_token": "tok-sea-1", "card_id": "c_88"}))

add(scenario(
    "social-brand-day", "base", ["social"],
    {"social": social_state(
        tweets={"0": tweet(0, "alice_k", "Morning espresso, then a long walk."),
                "1": tweet(1, "ben_j", "Shipping the new release today!"),
                "2": tweet(2, "alice_k", "Rainy days are for reading.")},
        next_tweet_id=3)},
    [
        turn("Log in to my twitter account.",
             gt=[call("authenticate_twitter", username="maya_r", password="mayaPass!9")],
             expect={0: {"authentication_status": True}},
             tools=tools_for(["social"])),
        turn("Post this for me: \"Launching our community garden project this "
             "weekend!\" and tag it #garden and #community.",
             gt=[call("post_tweet",
                      content="Launching our community garden project this weekend!",
                      tags=["#garden", "#community"])],
             expect={0: tweet(3, "maya_r",
                              "Launching our community garden project this weekend!",
                              tags=["#garden", "#community"])}),
        turn("Now retweet Ben's release announcement, tweet 1.",
             gt=[call("retweet", tweet_id=1)],
             expect={0: {"retweet_status": "Successfully retweeted"}}),
        turn("Show me everything I've posted so far.",
             gt=[call("get_user_tweets", username="maya_r")],
             expect={0: [tweet(3, "maya_r",
                               "Launching our community garden project this weekend!",
                               tags=["#garden", "#community"])]}),
    ],
    credentials={"username": "maya_r", "password": "mayaPass!9"}))

# ---------------------------------------------------------------------------
# missing_functions

add(scenario(
    "mf-fs-find", "missing_functions", ["filesystem"],
    {"filesystem": {"root": {
        "Workspace": {"report_q1.txt": "q1 numbers",
                      "report_q2.txt": "q2 numbers",
                      "ideas": {"report_old.txt": "old material"}},
        "scratch.txt": "tmp"}, "cwd": "/"}},
    [
        turn("Track down every file with 'report' in its name, anywhere in the "
             "tree.",
             gt=[],
             tools=tools_for(["filesystem"], minus=["find"])),
        turn("A recursive search tool has been installed for you now. Please "
             "run that search.",
             gt=[call("find", name="report")],
             expect={0: {"matches": ["/Workspace/ideas/report_old.txt",
                                     "/Workspace/report_q1.txt",
                                     "/Workspace/report_q2.txt"]}},
             tools=tools_for(["filesystem"]), inject=["find"]),
        turn("Good. Go into Workspace and show me the lines of report_q1.txt "
             "containing 'q1'.",
             gt=[call("cd", folder="Workspace"),
                 call("grep", file_name="report_q1.txt", pattern="q1")],
             expect={0: {"current_working_directory": "/Workspace"},
                     1: {"matching_lines": ["q1 numbers"]}}),
    ]))

add(scenario(
    "mf-fs-grep", "missing_functions", ["filesystem"],
    {"filesystem": {"root": {
        "Inbox": {"memo_a.txt": "budget: approved\nschedule: pending",
                  "memo_b.txt": "budget: rejected\nnote: resubmit"}}, "cwd": "/"}},
    [
        turn("Which lines in memo_a.txt mention 'budget'? The file lives in "
             "Inbox.",
             gt=[],
             tools=tools_for(["filesystem"], minus=["grep"])),
        turn("The line-search tool is available to you now. Check both memos "
             "in Inbox for 'budget'.",
             gt=[call("cd", folder="Inbox"),
                 call("grep", file_name="memo_a.txt", pattern="budget"),
                 call("grep", file_name="memo_b.txt", pattern="budget")],
             expect={0: {"current_working_directory": "/Inbox"},
                     1: {"matching_lines": ["budget: approved"]},
                     2: {"matching_lines": ["budget: rejected"]}},
             tools=tools_for(["filesystem"]), inject=["grep"]),
    ]))

add(scenario(
    "mf-travel-cost", "missing_functions", ["travel"],
    {"travel": travel_state(
        airports=["AUS", "MIA", "JFK"],
        flight_costs={"AUS|MIA|2025-01-20|economy": 180.0},
        access_token="tok-aus", logged_in=True, cards={"card_7": 900.0},
        next_booking_id=7100, next_transaction_id=8200)},
    [
        turn("How much would AUS to MIA cost in economy on 2025-01-20?",
             gt=[],
             tools=tools_for(["travel"], minus=["get_flight_cost"])),
        turn("The pricing lookup is back online for you. Get me that quote.",
             gt=[call("get_flight_cost", travel_from="AUS", travel_to="MIA",
                      travel_date="2025-01-20", travel_class="economy")],
             expect={0: {"travel_cost_list": [180.0]}},
             tools=tools_for(["travel"]), inject=["get_flight_cost"]),
        turn("Book it with my saved card.",
             gt=[call("book_flight", access_token="tok-aus", card_id="card_7",
                      travel_date="2025-01-20", travel_from="AUS", travel_to="MIA",
                      travel_class="economy", travel_cost=180.0)],
             expect={0: {"booking_id": "7100", "transaction_id": "8200",
                         "booking_status": True}}),
    ],
    credentials={"access_token": "tok-aus", "card_id": "card_7"}))

add(scenario(
    "mf-travel-distance", "missing_functions", ["travel"],
    {"travel": travel_state(
        zipcodes={"Brookfield": "45201", "Marshall": "61102"},
        distances={"45201|61102": 310.0})},
    [
        turn("Look up the zipcodes for Brookfield and for Marshall.",
             gt=[call("get_zipcode_based_on_city", city="Brookfield"),
                 call("get_zipcode_based_on_city", city="Marshall")],
             expect={0: {"zipcode": "45201"}, 1: {"zipcode": "61102"}},
             tools=tools_for(["travel"], minus=["estimate_distance"])),
        turn("Now estimate the driving distance between the two.",
             gt=[]),
        turn("The distance estimator has been enabled for you — run it.",
             gt=[call("estimate_distance", cityA="45201", cityB="61102")],
             expect={0: {"distance": 310.0}},
             tools=tools_for(["travel"]), inject=["estimate_distance"]),
    ]))

add(scenario(
    "mf-social-retweet", "missing_functions", ["social"],
    {"social": social_state(
        tweets={"0": tweet(0, "chef_dana", "Tried a new sourdough starter today."),
                "1": tweet(1, "chef_dana", "Plating matters as much as taste."),
                "2": tweet(2, "ravi_g", "Signed up for the city marathon!")},
        next_tweet_id=3)},
    [
        turn("Log me in to twitter.",
             gt=[call("authenticate_twitter", username="sam_p", password="samSecret44")],
             expect={0: {"authentication_status": True}},
             tools=tools_for(["social"], minus=["retweet"])),
        turn("Retweet Ravi's marathon announcement, tweet 2.",
             gt=[]),
        turn("Retweet support has been enabled for your account — go ahead.",
             gt=[call("retweet", tweet_id=2)],
             expect={0: {"retweet_status": "Successfully retweeted"}},
             tools=tools_for(["social"]), inject=["retweet"]),
        turn("Also list Dana's tweets for me.",
             gt=[call("get_user_tweets", username="chef_dana")],
             expect={0: [tweet(0, "chef_dana", "Tried a new sourdough starter today."),
                         tweet(1, "chef_dana", "Plating matters as much as taste.")]}),
    ],
    credentials={"username": "sam_p", "password": "samSecret44"}))

add(scenario(
    "mf-vehicle-start", "missing_functions", ["vehicle"],
    {"vehicle": vehicle_state(fuel_level=12.0)},
    [
        turn("Lock all four doors and press the brake pedal all the way down.",
             gt=[call("lockDoors", unlock=False,
                      door=["driver", "passenger", "rear_left", "rear_right"]),
                 call("pressBrakePedal", pedalPosition=1.0)],
             expect={0: {"lockStatus": "locked", "remainingUnlockedDoors": 0},
                     1: {"brakePedalStatus": "pressed", "brakePedalForce": 1000.0}},
             tools=tools_for(["vehicle"], minus=["startEngine"])),
        turn("Now start the engine.",
             gt=[]),
        turn("Ignition control is unlocked for you now. Start it.",
             gt=[call("startEngine", ignitionMode="START")],
             expect={0: {"engineState": "running", "fuelLevel": 12.0,
                         "batteryVoltage": 12.6}},
             tools=tools_for(["vehicle"]), inject=["startEngine"]),
    ]))

# ---------------------------------------------------------------------------
# missing_parameters

add(scenario(
    "mp-fs-remove", "missing_parameters", ["filesystem"],
    {"filesystem": {"root": {
        "Desk": {"draft_v1.txt": "first pass", "draft_v2.txt": "second pass",
                 "draft_final.txt": "final text"}}, "cwd": "/"}},
    [
        turn("Tidy up the Desk folder for me — delete the draft we don't need "
             "any more.",
             gt=[],
             tools=tools_for(["filesystem"])),
        turn("Sorry, I meant draft_v1.txt. Go into Desk and remove it.",
             gt=[call("cd", folder="Desk"), call("rm", file_name="draft_v1.txt")],
             expect={0: {"current_working_directory": "/Desk"},
                     1: {"result": "'draft_v1.txt' removed."}}),
        turn("Also rename draft_v2.txt to draft_final_v2.txt and list what's "
             "left.",
             gt=[call("mv", source="draft_v2.txt", destination="draft_final_v2.txt"),
                 call("ls")],
             expect={0: {"result": "'draft_v2.txt' moved to 'draft_final_v2.txt'"},
                     1: {"current_directory_content":
                         ["draft_final.txt", "draft_final_v2.txt"]}}),
    ]))

add(scenario(
    "mp-fs-copy", "missing_parameters", ["filesystem"],
    {"filesystem": {"root": {
        "Specs": {"api_spec.md": "endpoints", "ui_spec.md": "screens"},
        "handover.txt": "welcome aboard"}, "cwd": "/"}},
    [
        turn("Make a backup copy of one of the spec files in Specs — you know "
             "the one I rely on.",
             gt=[],
             tools=tools_for(["filesystem"])),
        turn("The API one. Go into Specs and copy api_spec.md to "
             "api_spec_backup.md.",
             gt=[call("cd", folder="Specs"),
                 call("cp", source="api_spec.md", destination="api_spec_backup.md")],
             expect={0: {"current_working_directory": "/Specs"},
                     1: {"result": "'api_spec.md' copied to 'api_spec_backup.md'"}}),
        turn("List the folder to confirm.",
             gt=[call("ls")],
             expect={0: {"current_directory_content":
                         ["api_spec.md", "api_spec_backup.md", "ui_spec.md"]}}),
    ]))

add(scenario(
    "mp-travel-book", "missing_parameters", ["travel"],
    {"travel": travel_state(
        airports=["PDX", "SLC", "PHX"],
        flight_costs={"PDX|PHX|2025-02-14|economy": 260.0},
        access_token="tok-pdx", logged_in=True, cards={"c_veloz": 4000.0},
        next_booking_id=6401, next_transaction_id=7401)},
    [
        turn("I need to get to Phoenix next month. Sort out a flight for me.",
             gt=[],
             tools=tools_for(["travel"])),
        turn("Right: leaving PDX on 2025-02-14, economy is fine. Quote it "
             "first, then book it with my saved card.",
             gt=[call("get_flight_cost", travel_from="PDX", travel_to="PHX",
                      travel_date="2025-02-14", travel_class="economy"),
                 call("book_flight", access_token="tok-pdx", card_id="c_veloz",
                      travel_date="2025-02-14", travel_from="PDX", travel_to="PHX",
                      travel_class="economy", travel_cost=260.0)],
             expect={0: {"travel_cost_list": [260.0]},
                     1: {"booking_id": "6401", "transaction_id": "7401",
                         "booking_status": True}}),
        turn("Confirm my login status on the travel account.",
             gt=[call("travel_get_login_status")],
             expect={0: {"status": True}}),
    ],
    credentials={"access_token": "tok-pdx", "card_id": "c_veloz"}))

add(scenario(
    "mp-travel-distance", "missing_parameters", ["travel"],
    {"travel": travel_state(
        zipcodes={"Rivermist": "83214", "Stonebrook": "74532",
                  "Crescent Hollow": "99310"},
        distances={"74532|83214": 750.0, "74532|99310": 1100.0})},
    [
        turn("How far a drive is it to Stonebrook?",
             gt=[],
             tools=tools_for(["travel"])),
        turn("From Rivermist, of course. Look up both zipcodes and estimate "
             "the distance.",
             gt=[call("get_zipcode_based_on_city", city="Rivermist"),
                 call("get_zipcode_based_on_city", city="Stonebrook"),
                 call("estimate_distance", cityA="83214", cityB="74532")],
             expect={0: {"zipcode": "83214"}, 1: {"zipcode": "74532"},
                     2: {"distance": 750.0}}),
    ]))

add(scenario(
    "mp-social-post", "missing_parameters", ["social"],
    {"social": social_state(
        tweets={"0": tweet(0, "kai_m", "Throwback to last summer's road trip.")},
        next_tweet_id=1)},
    [
        turn("Log in to my account and then put up that announcement we "
             "discussed earlier.",
             gt=[call("authenticate_twitter", username="lena_v", password="lenaSecure77")],
             expect={0: {"authentication_status": True}},
             tools=tools_for(["social"])),
        turn("The text is: \"Volunteer sign-ups for the river cleanup open "
             "tomorrow at 9am.\" Tag it #cleanup.",
             gt=[call("post_tweet",
                      content="Volunteer sign-ups for the river cleanup open tomorrow at 9am.",
                      tags=["#cleanup"])],
             expect={0: tweet(1, "lena_v",
                              "Volunteer sign-ups for the river cleanup open tomorrow at 9am.",
                              tags=["#cleanup"])}),
        turn("Retweet Kai's road-trip post, tweet 0.",
             gt=[call("retweet", tweet_id=0)],
             expect={0: {"retweet_status": "Successfully retweeted"}}),
    ],
    credentials={"username": "lena_v", "password": "lenaSecure77"}))

add(scenario(
    "mp-social-retweet", "missing_parameters", ["social"],
    {"social": social_state(
        tweets={"0": tweet(0, "nora_s", "Coffee first, questions later."),
                "1": tweet(1, "nora_s", "Museum day with the kids."),
                "2": tweet(2, "nora_s", "New personal best at the pool!")},
        next_tweet_id=3)},
    [
        turn("Log in and retweet Nora's post.",
             gt=[call("authenticate_twitter", username="theo_b", password="theoPass11")],
             expect={0: {"authentication_status": True}},
             tools=tools_for(["social"])),
        turn("The swimming one — tweet 2.",
             gt=[call("retweet", tweet_id=2)],
             expect={0: {"retweet_status": "Successfully retweeted"}}),
        turn("Retweet it again so it stays on top of my feed.",
             gt=[call("retweet", tweet_id=2)],
             expect={0: {"retweet_status": "Already retweeted"}}),
    ],
    credentials={"username": "theo_b", "password": "theoPass11"}))

add(scenario(
    "mp-vehicle-fill", "missing_parameters", ["vehicle"],
    {"vehicle": vehicle_state(fuel_level=3.0)},
    [
        turn("Put some gas in the tank before my drive.",
             gt=[],
             tools=tools_for(["vehicle"])),
        turn("Let's do 30 gallons.",
             gt=[call("fillFuelTank", fuelAmount=30.0)],
             expect={0: {"fuelLevel": 33.0}}),
        turn("Will that cover a 600 mile run?",
             gt=[call("estimate_drive_feasibility_by_mileage", distance=600.0)],
             expect={0: {"canDrive": True}}),
    ]))

add(scenario(
    "mp-vehicle-lock", "missing_parameters", ["vehicle"],
    {"vehicle": vehicle_state(
        doors_locked={"driver": True, "passenger": True,
                      "rear_left": True, "rear_right": True})},
    [
        turn("Unlock a couple of doors for my passengers.",
             gt=[],
             tools=tools_for(["vehicle"])),
        turn("The driver door stays locked — open passenger and rear_left.",
             gt=[call("lockDoors", unlock=True, door=["passenger", "rear_left"])],
             expect={0: {"lockStatus": "unlocked", "remainingUnlockedDoors": 2}}),
        turn("Done loading. Lock everything again.",
             gt=[call("lockDoors", unlock=False,
                      door=["driver", "passenger", "rear_left", "rear_right"])],
             expect={0: {"lockStatus": "locked", "remainingUnlockedDoors": 0}}),
    ]))

# ---------------------------------------------------------------------------
# long_context

add(scenario(
    "lc-fs-inbox", "long_context", ["filesystem"],
    {"filesystem": {"root": {
        "Mail": {"todo.txt": "reply to vendor\nfile expenses", "archive": {}}},
        "cwd": "/"}},
    [
        turn("Somewhere below all that noise: please go into Mail and list "
             "what's there.",
             gt=[call("cd", folder="Mail"), call("ls")],
             expect={0: {"current_working_directory": "/Mail"},
                     1: {"current_directory_content": ["archive", "todo.txt"]}},
             tools=tools_for(["filesystem"]),
             blobs=[blob("fs-inbox", 0)]),
        turn("Move todo.txt into the archive folder.",
             gt=[call("mv", source="todo.txt", destination="archive")],
             expect={0: {"result": "'todo.txt' moved to 'archive'"}},
             blobs=[blob("fs-inbox", 1)]),
        turn("Step into archive and confirm it's there now.",
             gt=[call("cd", folder="archive"), call("ls")],
             expect={0: {"current_working_directory": "/Mail/archive"},
                     1: {"current_directory_content": ["todo.txt"]}},
             blobs=[blob("fs-inbox", 2)]),
    ]))

add(scenario(
    "lc-fs-sweep", "long_context", ["filesystem"],
    {"filesystem": {"root": {
        "Cache": {"tmp_1.dat": "x", "tmp_2.dat": "y", "keep.cfg": "retain"}},
        "cwd": "/"}},
    [
        turn("Ignore the pasted bulletin. Go into Cache and delete tmp_1.dat "
             "and tmp_2.dat.",
             gt=[call("cd", folder="Cache"), call("rm", file_name="tmp_1.dat"),
                 call("rm", file_name="tmp_2.dat")],
             expect={0: {"current_working_directory": "/Cache"},
                     1: {"result": "'tmp_1.dat' removed."},
                     2: {"result": "'tmp_2.dat' removed."}},
             tools=tools_for(["filesystem"]),
             blobs=[blob("fs-sweep", 0)]),
        turn("Now list the folder including hidden files so I can see what's "
             "left.",
             gt=[call("ls", a=True)],
             expect={0: {"current_directory_content": ["keep.cfg"]}},
             blobs=[blob("fs-sweep", 1)]),
    ]))

add(scenario(
    "lc-travel-quote", "long_context", ["travel"],
    {"travel": travel_state(
        airports=["OAK", "SAN", "LAS"],
        flight_costs={"OAK|LAS|2024-12-05|economy": 120.0},
        access_token="tok-oak", logged_in=True, cards={"c_lv": 800.0},
        next_booking_id=2201, next_transaction_id=3301)},
    [
        turn("Quote OAK to LAS, economy, on 2024-12-05.",
             gt=[call("get_flight_cost", travel_from="OAK", travel_to="LAS",
                      travel_date="2024-12-05", travel_class="economy")],
             expect={0: {"travel_cost_list": [120.0]}},
             tools=tools_for(["travel"]),
             blobs=[blob("tr-quote", 0)]),
        turn("Book it with my saved card.",
             gt=[call("book_flight", access_token="tok-oak", card_id="c_lv",
                      travel_date="2024-12-05", travel_from="OAK", travel_to="LAS",
                      travel_class="economy", travel_cost=120.0)],
             expect={0: {"booking_id": "2201", "transaction_id": "3301",
                         "booking_status": True}},
             blobs=[blob("tr-quote", 1)]),
        turn("Plans changed, cancel that booking.",
             gt=[call("cancel_booking", access_token="tok-oak", booking_id="2201")],
             expect={0: {"cancel_status": True}},
             blobs=[blob("tr-quote", 2)]),
    ],
    credentials={"access_token": "tok-oak", "card_id": "c_lv"}))

add(scenario(
    "lc-travel-zip", "long_context", ["travel"],
    {"travel": travel_state(
        zipcodes={"Maplewood": "07040", "Clearwater": "33755"},
        distances={"07040|33755": 1050.0})},
    [
        turn("Zipcodes for Maplewood and Clearwater, please.",
             gt=[call("get_zipcode_based_on_city", city="Maplewood"),
                 call("get_zipcode_based_on_city", city="Clearwater")],
             expect={0: {"zipcode": "07040"}, 1: {"zipcode": "33755"}},
             tools=tools_for(["travel"]),
             blobs=[blob("tr-zip", 0)]),
        turn("And the distance between the two?",
             gt=[call("estimate_distance", cityA="07040", cityB="33755")],
             expect={0: {"distance": 1050.0}},
             blobs=[blob("tr-zip", 1)]),
    ]))

add(scenario(
    "lc-social-launch", "long_context", ["social"],
    {"social": social_state(
        tweets={"0": tweet(0, "dev_tom", "Refactoring day.")}, next_tweet_id=1)},
    [
        turn("Log in to my twitter account.",
             gt=[call("authenticate_twitter", username="priya_k", password="priyaStrong55")],
             expect={0: {"authentication_status": True}},
             tools=tools_for(["social"]),
             blobs=[blob("so-launch", 0)]),
        turn("Post: \"Beta invites go out tonight — watch your inbox!\" with "
             "the tag #beta and a mention of @dev_tom.",
             gt=[call("post_tweet",
                      content="Beta invites go out tonight — watch your inbox!",
                      tags=["#beta"], mentions=["@dev_tom"])],
             expect={0: tweet(1, "priya_k",
                              "Beta invites go out tonight — watch your inbox!",
                              tags=["#beta"], mentions=["@dev_tom"])},
             blobs=[blob("so-launch", 1)]),
        turn("Retweet Tom's refactoring tweet, id 0.",
             gt=[call("retweet", tweet_id=0)],
             expect={0: {"retweet_status": "Successfully retweeted"}},
             blobs=[blob("so-launch", 2)]),
    ],
    credentials={"username": "priya_k", "password": "priyaStrong55"}))

add(scenario(
    "lc-social-digest", "long_context", ["social"],
    {"social": social_state(
        authenticated=True, username="news_bot",
        tweets={"0": tweet(0, "wren_h", "City council meets Thursday."),
                "1": tweet(1, "news_bot", "Weekly digest is live."),
                "2": tweet(2, "wren_h", "Farmers market moves indoors."),
                "3": tweet(3, "iris_l", "Rain expected all weekend.")},
        next_tweet_id=4)},
    [
        turn("Pull up everything wren_h has posted.",
             gt=[call("get_user_tweets", username="wren_h")],
             expect={0: [tweet(0, "wren_h", "City council meets Thursday."),
                         tweet(2, "wren_h", "Farmers market moves indoors.")]},
             tools=tools_for(["social"]),
             blobs=[blob("so-digest", 0)]),
        turn("Retweet the farmers market one, id 2.",
             gt=[call("retweet", tweet_id=2)],
             expect={0: {"retweet_status": "Successfully retweeted"}},
             blobs=[blob("so-digest", 1)]),
        turn("And post: \"Signal boost: the market is indoors this week.\"",
             gt=[call("post_tweet",
                      content="Signal boost: the market is indoors this week.")],
             expect={0: tweet(4, "news_bot",
                              "Signal boost: the market is indoors this week.")},
             blobs=[blob("so-digest", 2)]),
    ]))

add(scenario(
    "lc-vehicle-prep", "long_context", ["vehicle"],
    {"vehicle": vehicle_state(fuel_level=8.0)},
    [
        turn("Top the tank up with 40 gallons.",
             gt=[call("fillFuelTank", fuelAmount=40.0)],
             expect={0: {"fuelLevel": 48.0}},
             tools=tools_for(["vehicle"]),
             blobs=[blob("ve-prep", 0)]),
        turn("Lock every door, press the brake fully, and start the engine.",
             gt=[call("lockDoors", unlock=False,
                      door=["driver", "passenger", "rear_left", "rear_right"]),
                 call("pressBrakePedal", pedalPosition=1.0),
                 call("startEngine", ignitionMode="START")],
             expect={0: {"lockStatus": "locked", "remainingUnlockedDoors": 0},
                     1: {"brakePedalStatus": "pressed", "brakePedalForce": 1000.0},
                     2: {"engineState": "running", "fuelLevel": 48.0,
                         "batteryVoltage": 12.6}},
             blobs=[blob("ve-prep", 1)]),
        turn("Can we cover 900 miles on this tank?",
             gt=[call("estimate_drive_feasibility_by_mileage", distance=900.0)],
             expect={0: {"canDrive": True}},
             blobs=[blob("ve-prep", 2)]),
    ]))

add(scenario(
    "lc-vehicle-budget", "long_context", ["vehicle"],
    {"vehicle": vehicle_state(fuel_level=20.0)},
    [
        turn("Average these toll charges for me: 12.5, 8.0, 14.25 and 9.75.",
             gt=[call("mean", numbers=[12.5, 8.0, 14.25, 9.75])],
             expect={0: {"result": 11.125}},
             tools=tools_for(["vehicle"]),
             blobs=[blob("ve-budget", 0)]),
        turn("Is a 350 mile trip feasible on the current fuel?",
             gt=[call("estimate_drive_feasibility_by_mileage", distance=350.0)],
             expect={0: {"canDrive": True}},
             blobs=[blob("ve-budget", 1)]),
        turn("Then let's go: press the brake halfway and start the engine.",
             gt=[call("pressBrakePedal", pedalPosition=0.5),
                 call("startEngine", ignitionMode="START")],
             expect={0: {"brakePedalStatus": "pressed", "brakePedalForce": 500.0},
                     1: {"engineState": "running", "fuelLevel": 20.0,
                         "batteryVoltage": 12.6}},
             blobs=[blob("ve-budget", 2)]),
    ]))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for sc in SCENARIOS:
        path = OUT / f"{sc['id']}.json"
        path.write_text(json.dumps(sc, indent=2, ensure_ascii=False) + "\n",
                        encoding="utf-8")
    counts = {}
    for sc in SCENARIOS:
        counts[sc["split"]] = counts.get(sc["split"], 0) + 1
    print(f"wrote {len(SCENARIOS)} scenarios: {counts}")


if __name__ == "__main__":
    main()
