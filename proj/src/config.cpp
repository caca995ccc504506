#include "nsfd/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nsfd/problems.hpp"

namespace nsfd {

namespace {

using nlohmann::json;

std::vector<ContinuationStage> stages_from_json(const json& arr, const std::string& key) {
    if (!arr.is_array()) throw ConfigError("config: " + key + " must be an array of [gamma, sigma] pairs");
    std::vector<ContinuationStage> out;
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ConfigError("config: " + key + " entries must be [gamma, sigma] number pairs");
        out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return out;
}

template <class T>
void read_field(const json& j, const char* key, T& dst) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        dst = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: bad value type for key '") + key + "'");
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

    static const char* known[] = {"command",    "problem",         "sides",   "gamma",      "sigma",
                                  "schedule",   "method",          "newton_tol", "newton_max_iter",
                                  "damping",    "rho",             "max_sweeps", "phi_count",
                                  "rot_count",  "order_basis",     "out_dir", "seed",       "workers",
                                  "allow_unsafe"};
    std::vector<std::string> unknown;
    for (const auto& item : j.items())
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return item.key() == k; }) == std::end(known))
            unknown.push_back(item.key());
    if (!unknown.empty()) {
        std::ostringstream os;
        os << "config: unknown keys:";
        for (const auto& k : unknown) os << " '" << k << "'";
        throw ConfigError(os.str());
    }

    RunConfig cfg;
    read_field(j, "command", cfg.command);
    read_field(j, "problem", cfg.problem);
    read_field(j, "sides", cfg.sides);
    read_field(j, "gamma", cfg.gamma);
    read_field(j, "sigma", cfg.sigma);
    if (j.contains("schedule")) cfg.schedule = stages_from_json(j["schedule"], "schedule");
    read_field(j, "method", cfg.method);
    read_field(j, "newton_tol", cfg.newton_tol);
    read_field(j, "newton_max_iter", cfg.newton_max_iter);
    read_field(j, "damping", cfg.damping);
    read_field(j, "rho", cfg.rho);
    read_field(j, "max_sweeps", cfg.max_sweeps);
    read_field(j, "phi_count", cfg.phi_count);
    read_field(j, "rot_count", cfg.rot_count);
    read_field(j, "order_basis", cfg.order_basis);
    read_field(j, "out_dir", cfg.out_dir);
    read_field(j, "seed", cfg.seed);
    read_field(j, "workers", cfg.workers);
    read_field(j, "allow_unsafe", cfg.allow_unsafe);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

std::vector<ContinuationStage> parse_schedule_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: schedule: ") + e.what());
    }
    return stages_from_json(j, "schedule");
}

std::string serialize(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["problem"] = cfg.problem;
    j["sides"] = cfg.sides;
    j["gamma"] = cfg.gamma;
    j["sigma"] = cfg.sigma;
    auto sched = json::array();
    for (const auto& s : cfg.schedule) sched.push_back({s.gamma, s.sigma});
    j["schedule"] = sched;
    j["method"] = cfg.method;
    j["newton_tol"] = cfg.newton_tol;
    j["newton_max_iter"] = cfg.newton_max_iter;
    j["damping"] = cfg.damping;
    j["rho"] = cfg.rho;
    j["max_sweeps"] = cfg.max_sweeps;
    j["phi_count"] = cfg.phi_count;
    j["rot_count"] = cfg.rot_count;
    j["order_basis"] = cfg.order_basis;
    j["out_dir"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["allow_unsafe"] = cfg.allow_unsafe;
    return j.dump(2);
}

void validate(const RunConfig& cfg) {
    std::vector<std::string> bad;
    auto flag = [&](const std::string& key, const std::string& why) { bad.push_back(key + " (" + why + ")"); };

    if (cfg.command != "solve" && cfg.command != "convergence" && cfg.command != "verify" &&
        cfg.command != "dump-grid")
        flag("command", "expected solve|convergence|verify|dump-grid");
    auto names = problem_names();
    if (std::find(names.begin(), names.end(), cfg.problem) == names.end())
        flag("problem", "unknown name '" + cfg.problem + "'");
    if (cfg.sides.empty()) flag("sides", "empty");
    for (int s : cfg.sides)
        if (s < 3) {
            flag("sides", "every side must be >= 3");
            break;
        }
    if (!(cfg.newton_tol > 0)) flag("newton_tol", "must be positive");
    if (cfg.newton_max_iter < 1) flag("newton_max_iter", "must be >= 1");
    if (cfg.max_sweeps < 1) flag("max_sweeps", "must be >= 1");
    if (cfg.workers < 1) flag("workers", "must be >= 1");
    if (cfg.method != "linear_direct" && cfg.method != "newton" && cfg.method != "pseudo_time")
        flag("method", "expected linear_direct|newton|pseudo_time");
    if (cfg.damping != "none" && cfg.damping != "backtracking")
        flag("damping", "expected none|backtracking");
    if (cfg.order_basis != "axis" && cfg.order_basis != "diag") flag("order_basis", "expected axis|diag");
    if (cfg.method == "pseudo_time" && !(cfg.rho > 0)) flag("rho", "must be positive for pseudo_time");
    if (cfg.phi_count < 2) flag("phi_count", "must be >= 2");
    if (cfg.rot_count < 1) flag("rot_count", "must be >= 1");
    if (!cfg.allow_unsafe) {
        if (cfg.sigma < 0) flag("sigma", "must be >= 0");
        if (cfg.gamma + cfg.sigma < 0) flag("gamma", "gamma + sigma must be >= 0");
        for (std::size_t k = 0; k < cfg.schedule.size(); ++k) {
            const auto& st = cfg.schedule[k];
            if (st.sigma < 0 || st.gamma + st.sigma < 0)
                flag("schedule[" + std::to_string(k) + "]", "needs sigma >= 0 and gamma + sigma >= 0");
        }
    }

    if (!bad.empty()) {
        std::ostringstream os;
        os << "config: constraint violations:";
        for (const auto& b : bad) os << " " << b << ";";
        throw ConfigError(os.str());
    }
}

} // namespace nsfd
