#include "dreg/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dreg/errors.hpp"

namespace dreg {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::well: return "well";
        case Regime::easy: return "easy";
        default: return "hard";
    }
}

Regime regime_of(double r, double nu) {
    if (r >= 0.5) return Regime::well;
    if (2.0 * r + nu > 1.0) return Regime::easy;
    return Regime::hard;
}

namespace {

long long ceil_ll(double x) {
    const double c = std::ceil(x);
    if (!(c < 9.2e18)) throw input_error("schedule value overflows 64-bit integer");
    return static_cast<long long>(c);
}

void validate(const ScheduleInput& in) {
    if (in.n < 1) throw input_error("schedule: n must be >= 1");
    if (!(in.r > 0.0)) throw input_error("schedule: r must be positive");
    if (!(in.nu > 0.0) || in.nu > 1.0) throw input_error("schedule: nu must be in (0, 1]");
    if (!(in.alpha > 0.0) || in.alpha > 1.0)
        throw input_error("schedule: alpha must be in (0, 1]");
    if (!(in.R > 0.0) || !(in.M > 0.0)) throw input_error("schedule: R and M must be positive");
    if (!(in.eta0 > 0.0) || !(in.eta0 < 1.0 / (4.0 * in.kappa_sq)))
        throw input_error("schedule: eta0 must satisfy 0 < eta0 < 1/(4 kappa^2)");
}

}  // namespace

ScheduleSpec make_schedule(const ScheduleInput& in) {
    validate(in);
    const Regime regime = regime_of(in.r, in.nu);
    const double n = static_cast<double>(in.n);
    const double ratio = in.R * in.R / (in.M * in.M);
    const double A = ratio * n;
    const double denom = 2.0 * in.r + in.nu;
    const double ln_n = std::log(std::max(n, 2.0));
    const double log_factor = std::pow(ln_n, 2.0 / in.alpha);

    ScheduleSpec s;
    s.regime = regime;
    s.variant = in.variant;

    switch (regime) {
        case Regime::well: {
            if (in.variant < 1 || in.variant > 3)
                throw config_error("well regime supports variants 1..3");
            const double eta_t = std::pow(A, 1.0 / denom);
            if (in.variant == 1) {
                // One-pass SGD: T = (R^2/M^2) n iterations at b = 1, with the
                // step chosen so that eta*T matches the other variants.
                s.b = 1;
                s.T = ceil_ll(ratio * n);
                s.eta = std::min(in.eta0, ratio * std::pow(A, -(denom - 1.0) / denom));
            } else {
                s.b = in.variant == 2 ? ceil_ll(std::pow(n, (denom - 1.0) / denom)) : in.n;
                s.eta = in.eta0;
                s.T = ceil_ll(eta_t / in.eta0);
            }
            s.N_min = ceil_ll(log_factor * std::pow(A, (2.0 * in.r + 1.0) / (in.alpha * denom)));
            s.rate_exponent = -in.r / denom;
            break;
        }
        case Regime::easy: {
            if (in.variant < 1 || in.variant > 2)
                throw config_error("easy regime supports variants 1..2");
            s.b = in.variant == 1 ? ceil_ll(std::sqrt(n)) : in.n;
            s.eta = in.eta0;
            s.T = ceil_ll(std::pow(A, 1.0 / denom) / in.eta0);
            s.N_min = ceil_ll(log_factor * std::pow(A, (2.0 + in.nu) / (in.alpha * denom)));
            s.rate_exponent = -in.r / denom;
            break;
        }
        case Regime::hard: {
            if (in.variant < 1 || in.variant > 3)
                throw config_error("hard regime supports variants 1..3");
            if (!(in.logK > 1.0)) throw input_error("schedule: hard regime requires logK > 1");
            const double B = A / std::pow(ln_n, in.logK);
            if (!(B > 1.0))
                throw input_error("schedule: hard regime needs n large enough that B > 1");
            if (in.variant == 1) {
                s.b = 1;
                s.eta = std::min(in.eta0, std::pow(B, -denom));
                s.T = ceil_ll(std::pow(B, denom + 1.0));
            } else {
                s.b = in.variant == 2 ? ceil_ll(std::pow(B, denom)) : ceil_ll(B);
                s.eta = in.eta0;
                s.T = ceil_ll(B / in.eta0);
            }
            const double base_n = std::pow(B, (3.0 - 2.0 * in.r) / in.alpha);
            s.N_min = ceil_ll(std::max(base_n, log_factor * base_n));
            s.rate_exponent = -in.r;
            break;
        }
    }
    s.b = std::min<long long>(std::max<long long>(s.b, 1), in.n);
    s.T = std::max<long long>(s.T, 2);
    s.N_min = std::max<long long>(s.N_min, 1);
    return s;
}

std::string schedule_csv_row(const ScheduleSpec& s, long long n) {
    std::ostringstream os;
    os.precision(17);
    os << to_string(s.regime) << "," << s.variant << "," << n << "," << s.b << "," << s.eta << ","
       << s.T << "," << s.N_min << "," << s.rate_exponent;
    return os.str();
}

EnvelopeTerms theoretical_envelope(double eta, long long T, long long n, long long N, double r,
                                   double nu, double alpha, double b) {
    if (!(eta > 0.0) || T < 1 || n < 1 || N < 1 || !(b >= 1.0))
        throw input_error("theoretical_envelope: invalid arguments");
    const double et = eta * static_cast<double>(T);
    const double dn = static_cast<double>(n);
    const double effdim = std::pow(et, nu);  // N(lambda) = lambda^{-nu}, lambda = 1/(eta T)
    const double n_alpha = std::pow(static_cast<double>(N), alpha / 2.0);
    const double max_exp = std::max(nu, 1.0 - 2.0 * r);

    EnvelopeTerms e;
    e.bias = std::pow(et, -r);
    e.var_effdim = std::sqrt(effdim / dn);
    e.var_norm = std::pow(et, 0.5 - r) / std::sqrt(dn);
    const double indicator = r <= 0.5 ? std::pow(et, max_exp) : 0.0;
    e.second_stage = std::log(static_cast<double>(T)) * et / n_alpha * (1.0 + indicator);
    e.minibatch = std::sqrt(eta / b * std::pow(et, nu - 1.0)) *
                  std::sqrt(et / std::sqrt(dn) + std::sqrt(et) / n_alpha);
    e.phi = std::pow(et, max_exp / 2.0);
    e.B = 2.0 * et / dn + std::sqrt(et * effdim / dn) + et / n_alpha + 1.0;
    return e;
}

}  // namespace dreg
