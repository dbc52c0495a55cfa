#include "dreg/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dreg {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open for reading: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw input_error(path + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

long long parse_ll(const std::string& s, const std::string& path, int line_no) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw input_error(path + ":" + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
}

}  // namespace

void write_bags(const std::string& path, const std::vector<Bag>& bags) {
    std::ofstream out = open_out(path);
    const Eigen::Index d = bags.empty() ? 1 : bags.front().dim();
    out << "bag_id,sample_index";
    for (Eigen::Index c = 0; c < d; ++c) out << ",coord_" << c;
    out << "\n";
    for (const auto& bag : bags)
        for (Eigen::Index i = 0; i < bag.size(); ++i) {
            out << bag.id << "," << i;
            for (Eigen::Index c = 0; c < d; ++c) out << "," << format_double(bag.samples(i, c));
            out << "\n";
        }
}

std::vector<Bag> read_bags(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    int line_no = 1;
    if (!std::getline(in, line)) throw input_error(path + ": missing header row");
    const auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "bag_id" || header[1] != "sample_index")
        throw input_error(path + ":1: expected header bag_id,sample_index,coord_0,...");
    const auto d = static_cast<Eigen::Index>(header.size() - 2);

    std::vector<Bag> bags;
    std::vector<std::vector<double>> rows;  // rows of the bag being assembled
    long long cur_id = 0;
    bool have_bag = false;
    auto flush = [&]() {
        if (!have_bag) return;
        Bag bag;
        bag.id = static_cast<int>(cur_id);
        bag.samples.resize(static_cast<Eigen::Index>(rows.size()), d);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (Eigen::Index c = 0; c < d; ++c)
                bag.samples(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
        bags.push_back(std::move(bag));
        rows.clear();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size())
            throw input_error(path + ":" + std::to_string(line_no) + ": wrong field count");
        const long long id = parse_ll(f[0], path, line_no);
        if (!have_bag || id != cur_id) {
            flush();
            cur_id = id;
            have_bag = true;
        }
        std::vector<double> row(static_cast<std::size_t>(d));
        for (Eigen::Index c = 0; c < d; ++c)
            row[static_cast<std::size_t>(c)] = parse_double(f[static_cast<std::size_t>(c + 2)],
                                                            path, line_no);
        rows.push_back(std::move(row));
    }
    flush();
    if (bags.empty()) throw input_error(path + ": no sample rows");
    return bags;
}

void write_labels(const std::string& path, const LabeledBagSet& set) {
    std::ofstream out = open_out(path);
    out << "bag_id,y,true_f,m,s\n";
    for (Eigen::Index j = 0; j < set.n(); ++j) {
        out << set.bags[static_cast<std::size_t>(j)].id << "," << format_double(set.y[j]) << ","
            << format_double(set.true_f[j]) << ","
            << format_double(set.true_params[static_cast<std::size_t>(j)].mean) << ","
            << format_double(set.true_params[static_cast<std::size_t>(j)].std) << "\n";
    }
}

void read_labels(const std::string& path, LabeledBagSet& set) {
    std::ifstream in = open_in(path);
    std::string line;
    int line_no = 1;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{
                                       "bag_id", "y", "true_f", "m", "s"})
        throw input_error(path + ":1: expected header bag_id,y,true_f,m,s");
    std::vector<double> y, f;
    set.true_params.clear();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 5)
            throw input_error(path + ":" + std::to_string(line_no) + ": wrong field count");
        y.push_back(parse_double(fields[1], path, line_no));
        f.push_back(parse_double(fields[2], path, line_no));
        set.true_params.push_back({parse_double(fields[3], path, line_no),
                                   parse_double(fields[4], path, line_no)});
    }
    set.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    set.true_f = Eigen::Map<Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    if (!set.bags.empty() && set.n() != set.y.size())
        throw input_error(path + ": label count does not match bag count");
}

void write_model(const std::string& path, const FittedModel& model,
                 const BaseKernelSpec& base) {
    std::ofstream out = open_out(path);
    out << "dreg-model v1\n";
    out << "estimator: " << model.estimator << "\n";
    out << "config: " << model.config_summary << "\n";
    out << "n: " << model.alpha.size() << "\n";
    out << "base_kernel: " << to_string(base.family) << " sigma=" << format_double(base.sigma)
        << " d=" << base.dim << "\n";
    out << "outer_kernel: " << to_string(model.outer.family)
        << " tau=" << format_double(model.outer.tau) << "\n";
    out << "passes: " << model.passes << "\n";
    out << "alpha:\n";
    for (Eigen::Index i = 0; i < model.alpha.size(); ++i)
        out << format_double(model.alpha[i]) << "\n";
}

FittedModel read_model(const std::string& path, BaseKernelSpec& base_out) {
    std::ifstream in = open_in(path);
    std::string line;
    auto expect_prefix = [&](const std::string& prefix) {
        if (!std::getline(in, line) || line.rfind(prefix, 0) != 0)
            throw input_error(path + ": malformed model file, expected '" + prefix + "'");
        return line.substr(prefix.size());
    };
    if (!std::getline(in, line) || line != "dreg-model v1")
        throw input_error(path + ": not a dreg-model v1 file");
    FittedModel model;
    model.estimator = expect_prefix("estimator: ");
    model.config_summary = expect_prefix("config: ");
    const long long n = std::stoll(expect_prefix("n: "));

    std::istringstream bk(expect_prefix("base_kernel: "));
    std::string fam, sigma_kv, d_kv;
    bk >> fam >> sigma_kv >> d_kv;
    base_out = BaseKernelSpec::make(base_family_from_string(fam),
                                    std::stod(sigma_kv.substr(sigma_kv.find('=') + 1)),
                                    std::stoi(d_kv.substr(d_kv.find('=') + 1)));

    std::istringstream ok(expect_prefix("outer_kernel: "));
    std::string ofam, tau_kv;
    ok >> ofam >> tau_kv;
    const double tau = std::stod(tau_kv.substr(tau_kv.find('=') + 1));
    model.outer = outer_family_from_string(ofam) == OuterFamily::gaussian_on_embedding
                      ? OuterKernelSpec::gaussian_on_embedding(tau)
                      : OuterKernelSpec::linear_embedding();

    model.passes = std::stoll(expect_prefix("passes: "));
    expect_prefix("alpha:");
    model.alpha.resize(n);
    for (long long i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw input_error(path + ": truncated coefficient list");
        model.alpha[i] = std::stod(line);
    }
    return model;
}

void write_rate_report(const std::string& path, const RateReport& report) {
    std::ofstream out = open_out(path);
    out << "n,trials,mean_risk,std_risk,N_used,N_required\n";
    for (const auto& p : report.points)
        out << p.n << "," << p.trials << "," << format_double(p.mean_risk) << ","
            << format_double(p.std_risk) << "," << p.N_used << "," << p.N_required << "\n";
    out << "# {\"slope\": " << format_double(report.slope)
        << ", \"intercept\": " << format_double(report.intercept)
        << ", \"max_residual\": " << format_double(report.max_residual)
        << ", \"theoretical_exponent\": " << format_double(report.theoretical_exponent) << "}\n";
}

}  // namespace dreg
