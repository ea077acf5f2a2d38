// SPDX-License-Identifier: Apache-2.0

#include "env_internal.hpp"

namespace toolgym::detail {

namespace {

json tweet_to_json(const Tweet& t) {
    return {{"id", t.id},
            {"username", t.username},
            {"content", t.content},
            {"tags", t.tags},
            {"mentions", t.mentions}};
}

std::vector<std::string> string_list(const json& v) {
    std::vector<std::string> out;
    if (v.is_array())
        for (const auto& e : v)
            if (e.is_string()) out.push_back(e.get<std::string>());
    return out;
}

}  // namespace

ToolResult social_execute(SocialState& st, const ToolCall& call, const Ctx& ctx) {
    const json& a = call.arguments;

    if (call.name == "authenticate_twitter") {
        // Credentials are taken at face value; authentication just binds the
        // session to the given account.
        st.username = a.at("username").get<std::string>();
        st.authenticated = true;
        return ok_result({{"authentication_status", true}});
    }

    if (call.name == "post_tweet") {
        if (!st.authenticated) return ctx.fail("social.not-authenticated");
        Tweet t;
        t.id = st.next_tweet_id;
        t.username = st.username;
        t.content = a.at("content").get<std::string>();
        t.tags = string_list(a.value("tags", json::array()));
        t.mentions = string_list(a.value("mentions", json::array()));
        st.tweets[t.id] = t;
        ++st.next_tweet_id;
        return ok_result(tweet_to_json(t));
    }

    if (call.name == "retweet") {
        if (!st.authenticated) return ctx.fail("social.not-authenticated");
        const long id = a.at("tweet_id").get<long>();
        if (!st.tweets.count(id)) {
            const long lo = st.tweets.empty() ? 0 : st.tweets.begin()->first;
            const long hi = st.tweets.empty() ? 0 : st.tweets.rbegin()->first;
            return ctx.fail("social.tweet-not-found", {{"id", std::to_string(id)},
                                                       {"lo", std::to_string(lo)},
                                                       {"hi", std::to_string(hi)}});
        }
        auto& mine = st.retweets[st.username];
        if (mine.count(id)) return ok_result({{"retweet_status", "Already retweeted"}});
        mine.insert(id);
        return ok_result({{"retweet_status", "Successfully retweeted"}});
    }

    if (call.name == "get_user_tweets") {
        const std::string user = a.at("username").get<std::string>();
        json out = json::array();
        for (const auto& [id, t] : st.tweets) {
            (void)id;
            if (t.username == user) out.push_back(tweet_to_json(t));
        }
        return ok_result(out);
    }

    return ctx.fail("unknown-tool", {{"fn", call.name}});
}

json social_to_json(const SocialState& st) {
    json tweets = json::object();
    for (const auto& [id, t] : st.tweets) tweets[std::to_string(id)] = tweet_to_json(t);
    json retweets = json::object();
    for (const auto& [user, ids] : st.retweets) {
        json arr = json::array();
        for (long id : ids) arr.push_back(id);
        retweets[user] = arr;
    }
    return {{"authenticated", st.authenticated},
            {"username", st.username},
            {"tweets", tweets},
            {"next_tweet_id", st.next_tweet_id},
            {"retweets", retweets}};
}

SocialState social_from_json(const json& j) {
    SocialState st;
    st.authenticated = j.value("authenticated", false);
    st.username = j.value("username", "");
    for (const auto& [key, v] : object_field(j, "tweets").items()) {
        Tweet t;
        t.id = v.contains("id") ? v.at("id").get<long>() : std::stol(key);
        t.username = v.value("username", "");
        t.content = v.value("content", "");
        t.tags = string_list(v.value("tags", json::array()));
        t.mentions = string_list(v.value("mentions", json::array()));
        st.tweets[t.id] = t;
    }
    st.next_tweet_id = j.value("next_tweet_id", st.tweets.empty() ? 0 : st.tweets.rbegin()->first + 1);
    for (const auto& [user, ids] : object_field(j, "retweets").items())
        for (const auto& id : ids) st.retweets[user].insert(id.get<long>());
    return st;
}

}  // namespace toolgym::detail
