#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dreg/base_kernels.hpp"
#include "dreg/estimators.hpp"
#include "dreg/schedules.hpp"
#include "dreg/synth.hpp"

namespace dreg {

enum class EstimatorKind { sgd, gd, krr };

EstimatorKind estimator_kind_from_string(const std::string& s);
std::string to_string(EstimatorKind k);

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::gd;
    bool use_schedule = false;  // take (b, eta, T) from [schedule] instead
    double eta = 0.1;
    long long b = 1;
    long long T = 100;
    double lambda = 0.1;  // krr only
    Sampling sampling = Sampling::with_replacement;
    TailMode tail = TailMode::paper_tail;
};

struct ScheduleSection {
    double r = 0.5;
    double nu = 1.0;
    double alpha = 1.0;
    double R = 1.0;
    double M = 1.0;
    double eta0 = 0.1;
    double logK = 2.0;
    int variant = 3;
};

struct SweepConfig {
    std::vector<long long> n_values;
    std::vector<long long> N_values;
    int seeds = 1;
    long long N_cap = 512;
    double slope_threshold = 0.0;
    long long test_bags = 0;
    long long test_bag_size = 0;
};

/// Experiment configuration loaded from the flat key-value config format:
/// '[section]' headers, 'key = value' lines, '#' comments. Unknown sections
/// or keys are rejected with the offending line number.
struct ExperimentConfig {
    MetaConfig meta;
    BaseKernelSpec base;
    OuterKernelSpec outer = OuterKernelSpec::gaussian_on_embedding(1.0);
    EstimatorConfig estimator;
    ScheduleSection schedule;
    SweepConfig sweep;
    std::string out_dir = ".";
    std::optional<std::string> bags_path;    // [data] bags=...
    std::optional<std::string> labels_path;  // [data] labels=...
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace dreg
