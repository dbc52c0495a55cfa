#pragma once

#include <string>
#include <vector>

#include "dreg/analysis.hpp"
#include "dreg/estimators.hpp"
#include "dreg/synth.hpp"

namespace dreg {

/// Columnar bag format: header row, then records
/// bag_id,sample_index,coord_0..coord_{d-1} (comma-separated, UTF-8).
void write_bags(const std::string& path, const std::vector<Bag>& bags);
std::vector<Bag> read_bags(const std::string& path);

/// Labels file: bag_id,y,true_f,m,s
void write_labels(const std::string& path, const LabeledBagSet& set);
void read_labels(const std::string& path, LabeledBagSet& set);

/// Versioned text model format: header lines (estimator, config, n, kernel
/// specs, passes), then one coefficient per line at 17 significant digits.
void write_model(const std::string& path, const FittedModel& model,
                 const BaseKernelSpec& base);
FittedModel read_model(const std::string& path, BaseKernelSpec& base_out);

/// RateReport CSV: n,trials,mean_risk,std_risk rows followed by a one-line
/// footer with the fitted slope and the theoretical exponent.
void write_rate_report(const std::string& path, const RateReport& report);

/// All floats are written with 17 significant digits.
std::string format_double(double v);

}  // namespace dreg
