#include "backreaction/cli/config.hpp"

#include <sstream>
#include <stdexcept>

namespace backreaction::cli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Vec3 parse_vec3(const std::string& text) {
    std::string cleaned = text;
    for (auto& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream iss(cleaned);
    Vec3 v;
    if (!(iss >> v.x >> v.y >> v.z)) throw std::invalid_argument("expected three numbers: " + text);
    return v;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text.empty()) return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw std::invalid_argument("expected boolean: " + text);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream iss(text);
    std::string line;
    while (std::getline(iss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "system") cfg.system = value;
        else if (key == "eta") cfg.eta = std::stod(value);
        else if (key == "omega") cfg.omega = std::stod(value);
        else if (key == "e") cfg.e_vec = parse_vec3(value);
        else if (key == "b") cfg.b_vec = parse_vec3(value);
        else if (key == "method") cfg.method = value;
        else if (key == "steps") cfg.steps = std::stoi(value);
        else if (key == "tol") cfg.tol = std::stod(value);
        else if (key == "t-end") cfg.t_end = std::stod(value);
        else if (key == "samples") cfg.samples = std::stoi(value);
        else if (key == "sample-dt") cfg.sample_dt = std::stod(value);
        else if (key == "x0") cfg.x0 = parse_vec3(value);
        else if (key == "v0") cfg.v0 = parse_vec3(value);
        else if (key == "a0") cfg.a0 = parse_vec3(value);
        else if (key == "perturb-a0") cfg.perturb_a0 = std::stod(value);
        else if (key == "residual-samples") cfg.residual_samples = std::stoi(value);
        else if (key == "bound") cfg.bound = std::stod(value);
        else if (key == "on-trajectory") cfg.on_trajectory = parse_bool(value);
        else if (key == "solver") cfg.solver = value;
        else if (key == "format") cfg.format = value;
        else if (key == "out") cfg.out = value;
        else if (key == "no-timestamp") cfg.no_timestamp = parse_bool(value);
        else if (key == "seed") cfg.seed = static_cast<unsigned>(std::stoul(value));
        else if (key == "compare") cfg.compare = parse_bool(value);
        else if (key == "param") cfg.sweep_param = value;
        else if (key == "from") cfg.sweep_from = std::stod(value);
        else if (key == "to") cfg.sweep_to = std::stod(value);
        else if (key == "count") cfg.sweep_count = std::stoi(value);
        else if (key == "jobs") cfg.jobs = std::stoi(value);
        else throw std::invalid_argument("unknown config key: " + key);
    }
}

}  // namespace backreaction::cli
