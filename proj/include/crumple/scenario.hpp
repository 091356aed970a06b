#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "crumple/binding.hpp"
#include "crumple/collision.hpp"
#include "crumple/error.hpp"
#include "crumple/math.hpp"
#include "crumple/vehicle.hpp"

namespace crumple {

struct DriveEvent {
    double at = 0.0;
    double throttle = 0.0;
    double steer = 0.0;
};

/// Everything a headless run needs, parsed from a line-oriented `key = value`
/// file with `[section]` headers. `[obstacle]` and `[drive]` sections repeat.
struct Scenario {
    std::filesystem::path mesh_path;
    double mass = 1500.0;
    int control_points = 32;
    double alpha = kDefaultAlpha;
    double weight_floor = 0.0;
    std::uint32_t vehicle_id = 0;

    MaterialParams material;
    CoreParams core;

    Vec3 gravity{0.0, -9.81, 0.0};
    Pose initial_pose{{0.0, 0.0, 0.0}, {}};
    Vec3 initial_velocity;
    Vec3 initial_angular_velocity;

    std::vector<Obstacle> obstacles;
    std::vector<DriveEvent> drive_script;  // sorted by `at`

    double duration = 3.0;
    double dt = 1.0 / 120.0;
    int iterations = 8;
    double damping = 0.02;
    int output_cadence = 10;

    SolverParams solver_params() const {
        return {dt, iterations, material.max_deviation, damping};
    }

    AssemblyConfig assembly_config() const {
        AssemblyConfig cfg;
        cfg.material = material;
        cfg.solver = solver_params();
        cfg.core = core;
        cfg.gravity = gravity;
        cfg.initial_pose = initial_pose;
        cfg.initial_velocity = initial_velocity;
        cfg.initial_angular_velocity = initial_angular_velocity;
        cfg.obstacles = obstacles;
        return cfg;
    }
};

namespace detail {

struct PendingObstacle {
    std::string type;
    Vec3 point, normal{0, 1, 0}, center, half_extents{0.5, 0.5, 0.5};
    Quat orientation;
    double radius = 1.0;
    double friction = 0.0;
    int line = 0;
};

class ScenarioParser {
public:
    Scenario parse(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no_;
            strip(line);
            if (line.empty() || line[0] == '#' || line[0] == ';') continue;

            if (line.front() == '[') {
                if (line.back() != ']') fail("unterminated section header");
                open_section(line.substr(1, line.size() - 2));
                continue;
            }

            const auto eq = line.find('=');
            if (eq == std::string::npos) fail("expected 'key = value'");
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            strip(key);
            strip(value);
            if (key.empty()) fail("empty key");
            handle(key, value);
        }
        finish_pending_obstacle();

        if (scenario_.mesh_path.empty()) throw ConfigError("scenario is missing vehicle mesh");
        if (!(scenario_.duration > 0.0)) throw ConfigError("duration must be positive");
        if (!(scenario_.dt > 0.0)) throw ConfigError("dt must be positive");
        if (scenario_.iterations < 1) throw ConfigError("iterations must be at least 1");
        if (scenario_.output_cadence < 1) throw ConfigError("output cadence must be at least 1");
        if (!(scenario_.mass > 0.0)) throw ConfigError("vehicle mass must be positive");
        if (!(scenario_.damping >= 0.0 && scenario_.damping < 1.0)) {
            throw ConfigError("damping must be in [0, 1)");
        }
        const MaterialParams& m = scenario_.material;
        if (!(m.stiffness > 0.0 && m.stiffness <= 1.0)) {
            throw ConfigError("stiffness must be in (0, 1]");
        }
        if (!(m.attachment_stiffness > 0.0 && m.attachment_stiffness <= 1.0)) {
            throw ConfigError("attachment_stiffness must be in (0, 1]");
        }
        if (!(m.yield_strain > 0.0 && m.break_strain > m.yield_strain)) {
            throw ConfigError("require 0 < yield_strain < break_strain");
        }
        if (!(m.max_deviation > 0.0)) throw ConfigError("max_deviation must be positive");
        if (!(m.attachment_yield > 0.0)) throw ConfigError("attachment_yield must be positive");

        std::stable_sort(scenario_.drive_script.begin(), scenario_.drive_script.end(),
                         [](const DriveEvent& a, const DriveEvent& b) { return a.at < b.at; });
        return std::move(scenario_);
    }

private:
    static void strip(std::string& s) {
        const auto not_space = [](unsigned char c) { return !std::isspace(c); };
        s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
        s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError("line " + std::to_string(line_no_) + ": " + message);
    }

    double number(const std::string& value) const {
        try {
            std::size_t used = 0;
            const double d = std::stod(value, &used);
            std::string rest = value.substr(used);
            strip(rest);
            if (!rest.empty()) fail("trailing characters after number '" + value + "'");
            return d;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("expected a number, got '" + value + "'");
        }
    }

    int integer(const std::string& value) const {
        const double d = number(value);
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) != d) fail("expected an integer, got '" + value + "'");
        return i;
    }

    Vec3 vec3(const std::string& value) const {
        std::istringstream ss(value);
        double x, y, z;
        if (!(ss >> x >> y >> z)) fail("expected three numbers, got '" + value + "'");
        std::string rest;
        if (ss >> rest) fail("too many components in '" + value + "'");
        return {x, y, z};
    }

    Quat quat(const std::string& value) const {
        std::istringstream ss(value);
        double w, x, y, z;
        if (!(ss >> w >> x >> y >> z)) fail("expected four numbers (w x y z)");
        const Quat raw{w, x, y, z};
        if (!raw.is_finite() || raw.norm() < 1e-12) {
            fail("orientation must be a nonzero quaternion");
        }
        return raw.normalized();
    }

    void open_section(std::string name) {
        strip(name);
        finish_pending_obstacle();
        if (name == "obstacle") {
            pending_ = PendingObstacle{};
            pending_.line = line_no_;
            in_obstacle_ = true;
            section_ = name;
            return;
        }
        in_obstacle_ = false;
        if (name == "drive") {
            scenario_.drive_script.emplace_back();
            section_ = name;
            return;
        }
        if (name != "vehicle" && name != "material" && name != "core" && name != "world" &&
            name != "initial") {
            fail("unknown section [" + name + "]");
        }
        section_ = name;
    }

    void handle(const std::string& key, const std::string& value) {
        if (section_ == "vehicle") {
            if (key == "mesh") scenario_.mesh_path = value;
            else if (key == "mass") scenario_.mass = number(value);
            else if (key == "control_points") scenario_.control_points = integer(value);
            else if (key == "alpha") scenario_.alpha = number(value);
            else if (key == "weight_floor") scenario_.weight_floor = number(value);
            else if (key == "id") scenario_.vehicle_id = static_cast<std::uint32_t>(integer(value));
            else fail("unknown key '" + key + "' in [vehicle]");
        } else if (section_ == "material") {
            auto& m = scenario_.material;
            if (key == "stiffness") m.stiffness = number(value);
            else if (key == "yield_strain") m.yield_strain = number(value);
            else if (key == "break_strain") m.break_strain = number(value);
            else if (key == "max_deviation") m.max_deviation = number(value);
            else if (key == "attachment_stiffness") m.attachment_stiffness = number(value);
            else if (key == "attachment_yield") m.attachment_yield = number(value);
            else fail("unknown key '" + key + "' in [material]");
        } else if (section_ == "core") {
            auto& c = scenario_.core;
            if (key == "inertia") {
                c.inertia_diag = value == "auto" ? Vec3{0, 0, 0} : vec3(value);
            } else if (key == "wheel_fl") c.wheel_offsets[0] = vec3(value);
            else if (key == "wheel_fr") c.wheel_offsets[1] = vec3(value);
            else if (key == "wheel_rl") c.wheel_offsets[2] = vec3(value);
            else if (key == "wheel_rr") c.wheel_offsets[3] = vec3(value);
            else if (key == "max_drive_force") c.max_drive_force = number(value);
            else fail("unknown key '" + key + "' in [core]");
        } else if (section_ == "world") {
            if (key == "gravity") scenario_.gravity = vec3(value);
            else if (key == "duration") scenario_.duration = number(value);
            else if (key == "dt") scenario_.dt = number(value);
            else if (key == "iterations") scenario_.iterations = integer(value);
            else if (key == "damping") scenario_.damping = number(value);
            else if (key == "output_cadence") scenario_.output_cadence = integer(value);
            else fail("unknown key '" + key + "' in [world]");
        } else if (section_ == "initial") {
            if (key == "position") scenario_.initial_pose.position = vec3(value);
            else if (key == "orientation") scenario_.initial_pose.orientation = quat(value);
            else if (key == "velocity") scenario_.initial_velocity = vec3(value);
            else if (key == "angular_velocity") scenario_.initial_angular_velocity = vec3(value);
            else fail("unknown key '" + key + "' in [initial]");
        } else if (section_ == "obstacle") {
            if (key == "type") pending_.type = value;
            else if (key == "point") pending_.point = vec3(value);
            else if (key == "normal") pending_.normal = vec3(value);
            else if (key == "center") pending_.center = vec3(value);
            else if (key == "radius") pending_.radius = number(value);
            else if (key == "half_extents") pending_.half_extents = vec3(value);
            else if (key == "orientation") pending_.orientation = quat(value);
            else if (key == "friction") pending_.friction = number(value);
            else fail("unknown key '" + key + "' in [obstacle]");
        } else if (section_ == "drive") {
            auto& ev = scenario_.drive_script.back();
            if (key == "at") ev.at = number(value);
            else if (key == "throttle") ev.throttle = number(value);
            else if (key == "steer") ev.steer = number(value);
            else fail("unknown key '" + key + "' in [drive]");
        } else {
            fail("key '" + key + "' outside any section");
        }
    }

    void finish_pending_obstacle() {
        if (!in_obstacle_) return;
        in_obstacle_ = false;
        const auto where = "obstacle at line " + std::to_string(pending_.line);
        if (pending_.friction < 0.0 || pending_.friction > 1.0) {
            throw ConfigError(where + ": friction must be in [0, 1]");
        }
        Obstacle ob;
        ob.friction = pending_.friction;
        if (pending_.type == "halfspace") {
            const double len = pending_.normal.norm();
            if (len < 1e-12) throw ConfigError(where + ": zero normal");
            ob.shape = HalfSpace{pending_.point, pending_.normal / len};
        } else if (pending_.type == "sphere") {
            if (!(pending_.radius > 0.0)) throw ConfigError(where + ": radius must be positive");
            ob.shape = SphereObstacle{pending_.center, pending_.radius};
        } else if (pending_.type == "box") {
            const Vec3& h = pending_.half_extents;
            if (!(h.x > 0.0 && h.y > 0.0 && h.z > 0.0)) {
                throw ConfigError(where + ": half extents must be positive");
            }
            ob.shape = BoxObstacle{pending_.center, h, pending_.orientation};
        } else if (pending_.type.empty()) {
            throw ConfigError(where + ": missing type");
        } else {
            throw ConfigError(where + ": unknown type '" + pending_.type + "'");
        }
        scenario_.obstacles.push_back(ob);
    }

    Scenario scenario_;
    std::string section_;
    PendingObstacle pending_;
    bool in_obstacle_ = false;
    int line_no_ = 0;
};

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
    return detail::ScenarioParser{}.parse(in);
}

/// Parses a scenario file; a relative mesh path is resolved against the
/// config file's directory.
inline Scenario parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path.string());
    Scenario s = parse_scenario(in);
    if (s.mesh_path.is_relative()) {
        s.mesh_path = path.parent_path() / s.mesh_path;
    }
    return s;
}

}  // namespace crumple
