#include "weakkam/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "weakkam/csv.hpp"
#include "weakkam/solvers.hpp"

namespace weakkam {

namespace {

struct Value {
    enum class Type { Number, String, List } type = Type::String;
    double number = 0.0;
    std::string text;
    std::vector<Value> items;
};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

Value parse_value(const std::string& text, std::size_t& pos);

Value parse_list(const std::string& text, std::size_t& pos) {
    Value v;
    v.type = Value::Type::List;
    ++pos;  // consume '['
    while (true) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) throw ConfigError("config: unterminated list");
        if (text[pos] == ']') {
            ++pos;
            return v;
        }
        v.items.push_back(parse_value(text, pos));
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos < text.size() && text[pos] == ',') ++pos;
    }
}

Value parse_value(const std::string& text, std::size_t& pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) throw ConfigError("config: empty value");
    if (text[pos] == '[') return parse_list(text, pos);
    std::size_t end = pos;
    while (end < text.size() && text[end] != ',' && text[end] != ']') ++end;
    std::string token = trim(text.substr(pos, end - pos));
    pos = end;
    Value v;
    char* last = nullptr;
    const double num = std::strtod(token.c_str(), &last);
    if (last && *last == '\0' && !token.empty()) {
        v.type = Value::Type::Number;
        v.number = num;
    } else {
        v.type = Value::Type::String;
        v.text = token;
    }
    return v;
}

Value parse_value_line(const std::string& text) {
    std::size_t pos = 0;
    Value v = parse_value(text, pos);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) throw ConfigError("config: trailing characters after value: " + text);
    return v;
}

double as_number(const Value& v, const std::string& key) {
    if (v.type != Value::Type::Number)
        throw ConfigError("config: key '" + key + "' expects a number");
    return v.number;
}

std::vector<double> as_number_list(const Value& v, const std::string& key) {
    if (v.type != Value::Type::List)
        throw ConfigError("config: key '" + key + "' expects a list");
    std::vector<double> out;
    for (const auto& item : v.items) out.push_back(as_number(item, key));
    return out;
}

PotentialTerm as_potential_term(const Value& v, int dimension, const std::string& key) {
    if (v.type != Value::Type::List || v.items.size() != 3)
        throw ConfigError("config: '" + key + "' entries are [frequency, cos_coef, sin_coef]");
    PotentialTerm t;
    const Value& f = v.items[0];
    if (f.type == Value::Type::Number) {
        if (dimension != 1)
            throw ConfigError("config: scalar frequency in '" + key + "' needs dimension 1");
        t.freq = {static_cast<int>(std::lround(f.number))};
    } else if (f.type == Value::Type::List) {
        for (const auto& c : f.items)
            t.freq.push_back(static_cast<int>(std::lround(as_number(c, key))));
    } else {
        throw ConfigError("config: bad frequency in '" + key + "'");
    }
    t.cos_coef = as_number(v.items[1], key);
    t.sin_coef = as_number(v.items[2], key);
    return t;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    bool saw_tau_scalar = false;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'section.key = value': " + line);
        const std::string key = trim(line.substr(0, eq));
        const Value value = parse_value_line(trim(line.substr(eq + 1)));

        if (key == "model.dimension") cfg.dimension = static_cast<int>(as_number(value, key));
        else if (key == "model.kind") cfg.model_kind = value.text.empty()
                                                           ? std::to_string(value.number)
                                                           : value.text;
        else if (key == "model.mass") cfg.mass = as_number(value, key);
        else if (key == "model.potential") {
            if (value.type != Value::Type::List)
                throw ConfigError("config: model.potential expects a list of terms");
            cfg.potential.clear();
            for (const auto& item : value.items)
                cfg.potential.push_back(as_potential_term(item, cfg.dimension, key));
        } else if (key == "action.tau") {
            cfg.tau = as_number(value, key);
            saw_tau_scalar = true;
        } else if (key == "action.tau_schedule") cfg.tau_schedule = as_number_list(value, key);
        else if (key == "action.p") {
            if (value.type == Value::Type::Number) cfg.p = {value.number};
            else cfg.p = as_number_list(value, key);
        } else if (key == "action.safety") cfg.safety = as_number(value, key);
        else if (key == "grid.n") cfg.n = static_cast<int>(as_number(value, key));
        else if (key == "grid.c_h") cfg.c_h = as_number(value, key);
        else if (key == "solver.delta_schedule") cfg.delta_schedule = as_number_list(value, key);
        else if (key == "solver.tol") cfg.tol = as_number(value, key);
        else if (key == "solver.selection_tol") cfg.selection_tol = as_number(value, key);
        else if (key == "solver.max_iter") cfg.max_iter = static_cast<long>(as_number(value, key));
        else if (key == "sweep.coupling") cfg.sweep_coupling = as_number(value, key);
        else if (key == "output.directory") cfg.output_directory = value.text;
        else if (key == "output.precision") cfg.precision = static_cast<int>(as_number(value, key));
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    if (!saw_tau_scalar && !cfg.tau_schedule.empty()) cfg.tau = cfg.tau_schedule.front();
    if (cfg.p.empty()) cfg.p.assign(cfg.dimension, 0.0);
    if (cfg.delta_schedule.empty()) cfg.delta_schedule = default_delta_schedule();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    auto num = [](double v) { return format_double(v, 17); };
    auto list = [&](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            s += num(v[i]);
        }
        return s + "]";
    };
    os << "model.dimension = " << cfg.dimension << "\n";
    os << "model.kind = " << cfg.model_kind << "\n";
    os << "model.mass = " << num(cfg.mass) << "\n";
    os << "model.potential = [";
    for (std::size_t i = 0; i < cfg.potential.size(); ++i) {
        const auto& t = cfg.potential[i];
        if (i) os << ", ";
        os << "[";
        if (cfg.dimension == 1) {
            os << t.freq[0];
        } else {
            os << "[";
            for (std::size_t k = 0; k < t.freq.size(); ++k) {
                if (k) os << ", ";
                os << t.freq[k];
            }
            os << "]";
        }
        os << ", " << num(t.cos_coef) << ", " << num(t.sin_coef) << "]";
    }
    os << "]\n";
    os << "action.tau = " << num(cfg.tau) << "\n";
    if (!cfg.tau_schedule.empty()) os << "action.tau_schedule = " << list(cfg.tau_schedule) << "\n";
    os << "action.p = " << list(cfg.p) << "\n";
    os << "action.safety = " << num(cfg.safety) << "\n";
    if (cfg.n > 0) os << "grid.n = " << cfg.n << "\n";
    os << "grid.c_h = " << num(cfg.c_h) << "\n";
    os << "solver.delta_schedule = " << list(cfg.delta_schedule) << "\n";
    os << "solver.tol = " << num(cfg.tol) << "\n";
    os << "solver.selection_tol = " << num(cfg.selection_tol) << "\n";
    os << "solver.max_iter = " << cfg.max_iter << "\n";
    os << "sweep.coupling = " << num(cfg.sweep_coupling) << "\n";
    os << "output.directory = " << cfg.output_directory << "\n";
    os << "output.precision = " << cfg.precision << "\n";
    return os.str();
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.dimension < 1) throw ConfigError("config: model.dimension must be >= 1");
    if (cfg.model_kind != "quadratic-kinetic-plus-potential")
        throw ConfigError("config: unsupported model.kind '" + cfg.model_kind +
                          "' (custom tables are programmatic only)");
    if (!(cfg.mass > 0.0)) throw ConfigError("config: model.mass must be positive");
    if (!(cfg.tol > 0.0)) throw ConfigError("config: solver.tol must be positive");
    if (!(cfg.selection_tol > 0.0))
        throw ConfigError("config: solver.selection_tol must be positive");
    if (cfg.max_iter < 1) throw ConfigError("config: solver.max_iter must be >= 1");
    if (cfg.precision < 1 || cfg.precision > 17)
        throw ConfigError("config: output.precision must lie in [1, 17]");
    if (!(cfg.safety >= 1.0)) throw ConfigError("config: action.safety must be >= 1");
    if (!(cfg.c_h > 0.0)) throw ConfigError("config: grid.c_h must be positive");
    if (static_cast<int>(cfg.p.size()) != cfg.dimension)
        throw ConfigError("config: action.p dimension mismatch");
    for (const auto& t : cfg.potential)
        if (static_cast<int>(t.freq.size()) != cfg.dimension)
            throw ConfigError("config: potential frequency dimension mismatch");

    auto check_decreasing = [](const std::vector<double>& s, const std::string& name) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] > 0.0)) throw ConfigError("config: " + name + " entries must be positive");
            if (i > 0 && !(s[i] < s[i - 1]))
                throw ConfigError("config: " + name + " must be strictly decreasing");
        }
    };
    check_decreasing(cfg.delta_schedule, "solver.delta_schedule");
    check_decreasing(cfg.tau_schedule, "action.tau_schedule");

    // Window precondition h <= tau * R for every tau/n pairing.
    for (double tau : tau_entries(cfg)) {
        if (!(tau > 0.0 && tau <= 1.0))
            throw ConfigError("config: action.tau must lie in (0,1]");
        DiscreteAction action = make_action(cfg, tau);
        const AprioriBounds bounds = estimate_bounds(action, cfg.safety);
        const int n = grid_nodes_for(cfg, tau);
        if (n < 4) throw ConfigError("config: grid needs at least 4 nodes per dimension");
        if (1.0 / n > tau * bounds.window_radius)
            throw ConfigError("config: grid spacing exceeds tau * window_radius for tau = " +
                              format_double(tau, 6));
    }
}

LagrangianModel make_model(const ExperimentConfig& cfg) {
    if (cfg.model_kind != "quadratic-kinetic-plus-potential")
        throw ConfigError("config: unsupported model.kind '" + cfg.model_kind + "'");
    return LagrangianModel::mechanical(cfg.dimension, cfg.mass, cfg.potential);
}

DiscreteAction make_action(const ExperimentConfig& cfg, double tau) {
    return DiscreteAction(make_model(cfg), tau, cfg.p);
}

int grid_nodes_for(const ExperimentConfig& cfg, double tau) {
    if (cfg.n > 0) return cfg.n;
    return std::max(4, static_cast<int>(std::ceil(1.0 / (cfg.c_h * tau * tau))));
}

std::vector<double> tau_entries(const ExperimentConfig& cfg) {
    if (!cfg.tau_schedule.empty()) return cfg.tau_schedule;
    return {cfg.tau};
}

}  // namespace weakkam
