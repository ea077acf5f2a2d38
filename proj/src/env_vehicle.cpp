// SPDX-License-Identifier: Apache-2.0

#include "env_internal.hpp"

namespace toolgym::detail {

namespace {

const char* kDoors[] = {"driver", "passenger", "rear_left", "rear_right"};

int unlocked_count(const VehicleState& st) {
    int n = 0;
    for (const auto& [d, locked] : st.door_locked) {
        (void)d;
        if (!locked) ++n;
    }
    return n;
}

}  // namespace

ToolResult vehicle_execute(VehicleState& st, const ToolCall& call, const Ctx& ctx) {
    const json& a = call.arguments;

    if (call.name == "fillFuelTank") {
        const double amount = a.at("fuelAmount").get<double>();
        if (amount < 0) return ctx.fail("vehicle.negative-fuel");
        if (st.fuel_level + amount > st.tank_capacity)
            return ctx.fail("vehicle.overfill",
                            {{"capacity", format_number(st.tank_capacity)},
                             {"level", format_number(st.fuel_level)},
                             {"room", format_number(st.tank_capacity - st.fuel_level)}});
        st.fuel_level += amount;
        return ok_result({{"fuelLevel", st.fuel_level}});
    }

    if (call.name == "lockDoors") {
        const bool unlock = a.at("unlock").get<bool>();
        std::vector<std::string> doors;
        for (const auto& d : a.at("door")) {
            if (!d.is_string()) return ctx.fail("vehicle.bad-door", {{"door", d.dump()}});
            const std::string name = d.get<std::string>();
            bool known = false;
            for (const char* k : kDoors) known |= (name == k);
            if (!known) return ctx.fail("vehicle.bad-door", {{"door", name}});
            doors.push_back(name);
        }
        for (const auto& d : doors) st.door_locked[d] = !unlock;
        return ok_result({{"lockStatus", unlock ? "unlocked" : "locked"},
                          {"remainingUnlockedDoors", unlocked_count(st)}});
    }

    if (call.name == "startEngine") {
        const std::string mode = a.at("ignitionMode").get<std::string>();
        if (mode == "START") {
            if (st.engine_running) return ctx.fail("vehicle.engine-already-running");
            if (st.brake_pedal <= 0) return ctx.fail("vehicle.brake-not-pressed");
            st.engine_running = true;
            return ok_result({{"engineState", "running"},
                              {"fuelLevel", st.fuel_level},
                              {"batteryVoltage", st.battery_voltage}});
        }
        if (mode == "STOP") {
            if (!st.engine_running) return ctx.fail("vehicle.engine-not-running");
            st.engine_running = false;
            return ok_result({{"engineState", "stopped"},
                              {"fuelLevel", st.fuel_level},
                              {"batteryVoltage", st.battery_voltage}});
        }
        return ctx.fail("vehicle.bad-ignition", {{"mode", mode}});
    }

    if (call.name == "pressBrakePedal") {
        const double pos = a.at("pedalPosition").get<double>();
        if (pos < 0 || pos > 1) return ctx.fail("vehicle.bad-pedal");
        st.brake_pedal = pos;
        return ok_result({{"brakePedalStatus", pos > 0 ? "pressed" : "released"},
                          {"brakePedalForce", pos * 1000.0}});
    }

    if (call.name == "mean") {
        const json& numbers = a.at("numbers");
        if (numbers.empty()) return ctx.fail("vehicle.mean-empty");
        double sum = 0;
        for (const auto& v : numbers) {
            if (!v.is_number()) return ctx.fail("vehicle.mean-type", {{"got", py_type_name(v)}});
            sum += v.get<double>();
        }
        return ok_result({{"result", sum / double(numbers.size())}});
    }

    if (call.name == "estimate_drive_feasibility_by_mileage") {
        const double distance = a.at("distance").get<double>();
        if (distance < 0) return ctx.fail("vehicle.negative-distance");
        return ok_result({{"canDrive", st.fuel_level * st.mpg >= distance}});
    }

    return ctx.fail("unknown-tool", {{"fn", call.name}});
}

json vehicle_to_json(const VehicleState& st) {
    json doors = json::object();
    for (const auto& [d, locked] : st.door_locked) doors[d] = locked;
    return {{"fuel_level", st.fuel_level},
            {"tank_capacity", st.tank_capacity},
            {"doors_locked", doors},
            {"brake_pedal", st.brake_pedal},
            {"engine_running", st.engine_running},
            {"mpg", st.mpg},
            {"battery_voltage", st.battery_voltage}};
}

VehicleState vehicle_from_json(const json& j) {
    VehicleState st;
    st.fuel_level = j.value("fuel_level", 0.0);
    st.tank_capacity = j.value("tank_capacity", 50.0);
    if (j.contains("doors_locked"))
        for (const auto& [d, locked] : j.at("doors_locked").items())
            st.door_locked[d] = locked.get<bool>();
    else
        for (const char* d : kDoors) st.door_locked[d] = false;
    st.brake_pedal = j.value("brake_pedal", 0.0);
    st.engine_running = j.value("engine_running", false);
    st.mpg = j.value("mpg", 20.0);
    st.battery_voltage = j.value("battery_voltage", 12.6);
    return st;
}

}  // namespace toolgym::detail
