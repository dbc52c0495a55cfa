#pragma once

#include <string>

namespace dreg {

/// Learning regimes by smoothness r and capacity nu:
///   well: r >= 1/2 (regression function in H_K)
///   easy: r <= 1/2 and 2r + nu > 1
///   hard: 2r + nu <= 1
enum class Regime { well, easy, hard };

std::string to_string(Regime r);
Regime regime_of(double r, double nu);

struct ScheduleInput {
    long long n = 1;
    double r = 0.5;        // smoothness, > 0
    double nu = 1.0;       // capacity, in (0, 1]
    double alpha = 1.0;    // Hoelder exponent, in (0, 1]
    double R = 1.0;        // source norm bound
    double M = 1.0;        // label bound
    double eta0 = 0.1;     // base step, < 1/(4 kappa^2)
    double kappa_sq = 1.0; // outer kernel bound
    double logK = 2.0;     // log exponent K > 1 (hard regime only)
    int variant = 3;       // per-regime variant (well/hard: 1..3, easy: 1..2)
};

struct ScheduleSpec {
    long long b = 1;
    double eta = 0.0;
    long long T = 2;
    long long N_min = 1;
    double rate_exponent = 0.0;  // exponent of the bound on ||S_K f - f_rho||_{L^2} in n
    Regime regime = Regime::well;
    int variant = 1;
};

/// Computes (b, eta, T, N_min) for the requested regime variant, using the
/// convention eta*T = (R^2 n / M^2)^{1/(2r+nu)} in the well/easy regimes and
/// eta*T = R^2 n / (M^2 log^K n) in the hard regime. Pure function.
ScheduleSpec make_schedule(const ScheduleInput& in);

/// One CSV row: regime,variant,n,b,eta,T,N_min,rate_exponent
std::string schedule_csv_row(const ScheduleSpec& s, long long n);

/// Leading terms of the excess-risk bound with unit constants, evaluated at
/// lambda = 1/(eta T) and N(lambda) = lambda^{-nu}. Shape diagnostics only.
struct EnvelopeTerms {
    double bias = 0.0;            // (eta T)^{-r}
    double var_effdim = 0.0;      // sqrt(N(lambda)/n)
    double var_norm = 0.0;        // (eta T)^{1/2 - r} / sqrt(n)
    double second_stage = 0.0;    // log(T) (eta T)/N^{a/2} (1 + 1_{r<=1/2}(eta T)^{max(nu,1-2r)})
    double minibatch = 0.0;       // sqrt((eta/b)(eta T)^{nu-1}) * (...)^{1/2}
    double phi = 0.0;             // (eta T)^{max(nu,1-2r)/2}
    double B = 0.0;               // 2 eta T/n + sqrt(eta T N(lambda)/n) + eta T/N^{a/2} + 1

    double total() const { return bias + var_effdim + var_norm + second_stage + minibatch; }
};

EnvelopeTerms theoretical_envelope(double eta, long long T, long long n, long long N, double r,
                                   double nu, double alpha, double b);

}  // namespace dreg
