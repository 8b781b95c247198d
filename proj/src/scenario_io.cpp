#include "cohsim/scenario_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace cohsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ScatteringScenario parse_scenario(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("scenario line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto take = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw std::invalid_argument(std::string("scenario: missing key ") + key);
        }
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_num = [&](const char* key) {
        const std::string v = take(key);
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) {
            throw std::invalid_argument(std::string("scenario: bad number for ") + key);
        }
        return d;
    };
    auto take_opt_num = [&](const char* key, double fallback) {
        return kv.count(key) ? take_num(key) : fallback;
    };

    ScatteringScenario s;
    s.name = kv.count("name") ? take("name") : "scenario";
    s.m_a = take_num("mass_a");
    s.m_b = take_num("mass_b");
    s.grid_a.n = static_cast<int>(take_num("n_a"));
    s.grid_b.n = static_cast<int>(take_num("n_b"));
    s.grid_a.length = take_num("box_a");
    s.grid_b.length = take_num("box_b");
    s.packet_a = {take_num("a_center"), take_num("a_width"), take_num("a_momentum")};
    s.packet_b = {take_num("b_center"), take_num("b_width"), take_num("b_momentum")};

    const std::string pot = take("potential");
    if (pot == "none") {
        s.potential.kind = Potential::Kind::none;
    } else if (pot == "gauss") {
        s.potential.kind = Potential::Kind::gauss;
        s.potential.v0 = take_num("v0");
        s.potential.width = take_num("range");
    } else if (pot == "soft_coulomb") {
        s.potential.kind = Potential::Kind::soft_coulomb;
        s.potential.v0 = take_num("v0");
        s.potential.soften = take_num("soften");
    } else {
        throw std::invalid_argument("scenario: unknown potential " + pot);
    }

    s.dt = take_num("dt");
    s.t_max = take_num("t_max");
    s.sample_stride = static_cast<int>(take_opt_num("sample_stride", 10));

    if (!kv.empty()) {
        throw std::invalid_argument("scenario: unknown key " + kv.begin()->first);
    }
    s.validate();
    return s;
}

ScatteringScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace cohsim
