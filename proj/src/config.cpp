#include "dreg/config.hpp"

#include <fstream>
#include <sstream>

namespace dreg {

EstimatorKind estimator_kind_from_string(const std::string& s) {
    if (s == "sgd") return EstimatorKind::sgd;
    if (s == "gd") return EstimatorKind::gd;
    if (s == "krr") return EstimatorKind::krr;
    throw input_error("unknown estimator kind: " + s);
}

std::string to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::sgd: return "sgd";
        case EstimatorKind::gd: return "gd";
        default: return "krr";
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Parser {
    std::string origin;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw config_error(origin + ":" + std::to_string(line_no) + ": " + msg);
    }

    double num(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) fail("bad number '" + v + "'");
            return d;
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            fail("bad number '" + v + "'");
        }
    }

    long long integer(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const long long d = std::stoll(v, &pos);
            if (pos != v.size()) fail("bad integer '" + v + "'");
            return d;
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            fail("bad integer '" + v + "'");
        }
    }

    std::uint64_t uinteger(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const std::uint64_t d = std::stoull(v, &pos);
            if (pos != v.size()) fail("bad integer '" + v + "'");
            return d;
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            fail("bad integer '" + v + "'");
        }
    }

    template <typename T, typename F>
    std::vector<T> list(const std::string& v, F&& conv) const {
        std::vector<T> out;
        std::istringstream is(v);
        std::string item;
        while (std::getline(is, item, ',')) out.push_back(conv(trim(item)));
        if (out.empty()) fail("empty list");
        return out;
    }
};

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    // Raw kernel fields; specs are constructed after the parse so derived
    // constants always go through the validating factories.
    std::string base_family = "gaussian";
    double base_sigma = 1.0;
    int base_dim = 1;
    std::string outer_family = "gaussian_on_embedding";
    double outer_tau = 1.0;

    Parser p{origin};
    std::istringstream is(text);
    std::string raw, section;
    while (std::getline(is, raw)) {
        ++p.line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"meta",     "base_kernel", "outer_kernel", "estimator",
                                          "schedule", "sweep",       "output",       "data"};
            bool ok = false;
            for (const char* k : known) ok = ok || section == k;
            if (!ok) p.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) p.fail("key outside of any section");

        if (section == "meta") {
            if (key == "n") cfg.meta.n = p.integer(val);
            else if (key == "N") cfg.meta.N = p.integer(val);
            else if (key == "noise_std") cfg.meta.noise_std = p.num(val);
            else if (key == "label_bound") cfg.meta.label_bound = p.num(val);
            else if (key == "mean_min") cfg.meta.mean_min = p.num(val);
            else if (key == "mean_max") cfg.meta.mean_max = p.num(val);
            else if (key == "std_min") cfg.meta.std_min = p.num(val);
            else if (key == "std_max") cfg.meta.std_max = p.num(val);
            else if (key == "truth")
                cfg.meta.truth = val == "anchor_expansion" ? TruthMode::anchor_expansion
                               : val == "parametric"
                                   ? TruthMode::parametric
                                   : (p.fail("unknown truth mode '" + val + "'"),
                                      TruthMode::parametric);
            else if (key == "anchors") cfg.meta.anchors = static_cast<int>(p.integer(val));
            else if (key == "anchor_weights")
                cfg.meta.anchor_weights =
                    p.list<double>(val, [&](const std::string& s) { return p.num(s); });
            else if (key == "seed") cfg.meta.seed = p.uinteger(val);
            else p.fail("unknown key '" + key + "' in [meta]");
        } else if (section == "base_kernel") {
            if (key == "family") base_family = val;
            else if (key == "sigma") base_sigma = p.num(val);
            else if (key == "d") base_dim = static_cast<int>(p.integer(val));
            else p.fail("unknown key '" + key + "' in [base_kernel]");
        } else if (section == "outer_kernel") {
            if (key == "family") outer_family = val;
            else if (key == "tau") outer_tau = p.num(val);
            else p.fail("unknown key '" + key + "' in [outer_kernel]");
        } else if (section == "estimator") {
            if (key == "kind") {
                try {
                    cfg.estimator.kind = estimator_kind_from_string(val);
                } catch (const input_error& e) {
                    p.fail(e.what());
                }
            } else if (key == "use_schedule")
                cfg.estimator.use_schedule = val == "true" || val == "1";
            else if (key == "eta") cfg.estimator.eta = p.num(val);
            else if (key == "b") cfg.estimator.b = p.integer(val);
            else if (key == "T") cfg.estimator.T = p.integer(val);
            else if (key == "lambda") cfg.estimator.lambda = p.num(val);
            else if (key == "sampling") {
                try {
                    cfg.estimator.sampling = sampling_from_string(val);
                } catch (const input_error& e) {
                    p.fail(e.what());
                }
            } else if (key == "tail") {
                try {
                    cfg.estimator.tail = tail_from_string(val);
                } catch (const input_error& e) {
                    p.fail(e.what());
                }
            } else
                p.fail("unknown key '" + key + "' in [estimator]");
        } else if (section == "schedule") {
            if (key == "r") cfg.schedule.r = p.num(val);
            else if (key == "nu") cfg.schedule.nu = p.num(val);
            else if (key == "alpha") cfg.schedule.alpha = p.num(val);
            else if (key == "R") cfg.schedule.R = p.num(val);
            else if (key == "M") cfg.schedule.M = p.num(val);
            else if (key == "eta0") cfg.schedule.eta0 = p.num(val);
            else if (key == "logK") cfg.schedule.logK = p.num(val);
            else if (key == "variant") cfg.schedule.variant = static_cast<int>(p.integer(val));
            else p.fail("unknown key '" + key + "' in [schedule]");
        } else if (section == "sweep") {
            if (key == "n_values")
                cfg.sweep.n_values =
                    p.list<long long>(val, [&](const std::string& s) { return p.integer(s); });
            else if (key == "N_values")
                cfg.sweep.N_values =
                    p.list<long long>(val, [&](const std::string& s) { return p.integer(s); });
            else if (key == "seeds") cfg.sweep.seeds = static_cast<int>(p.integer(val));
            else if (key == "N_cap") cfg.sweep.N_cap = p.integer(val);
            else if (key == "slope_threshold") cfg.sweep.slope_threshold = p.num(val);
            else if (key == "test_bags") cfg.sweep.test_bags = p.integer(val);
            else if (key == "test_bag_size") cfg.sweep.test_bag_size = p.integer(val);
            else p.fail("unknown key '" + key + "' in [sweep]");
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = val;
            else p.fail("unknown key '" + key + "' in [output]");
        } else if (section == "data") {
            if (key == "bags") cfg.bags_path = val;
            else if (key == "labels") cfg.labels_path = val;
            else p.fail("unknown key '" + key + "' in [data]");
        }
    }

    try {
        cfg.base = BaseKernelSpec::make(base_family_from_string(base_family), base_sigma, base_dim);
        cfg.outer = outer_family_from_string(outer_family) == OuterFamily::gaussian_on_embedding
                        ? OuterKernelSpec::gaussian_on_embedding(outer_tau)
                        : OuterKernelSpec::linear_embedding(cfg.base.gamma_sq());
        cfg.meta.validate();
    } catch (const input_error& e) {
        throw config_error(origin + ": " + e.what());
    }
    return cfg;
}

}  // namespace dreg
