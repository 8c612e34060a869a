#pragma once

#include <span>
#include <string>
#include <vector>

#include "hotelwatt/eval.hpp"
#include "hotelwatt/features.hpp"

namespace hotelwatt::report {

std::string report_json(const eval::EvalReport& report);

/// `date,actual_kwh,predicted_kwh`.
std::string series_csv(std::span<const eval::SeriesPoint> series);

/// `h1,h2,h3,val_mse,seed,rank`, in rank order.
std::string trial_log_csv(std::span<const eval::TrialRecord> trials);

/// `epoch,train_mse`, epochs counted from 1.
std::string loss_history_csv(std::span<const double> loss_history);

/// `date,predicted_kwh`.
std::string predictions_csv(std::span<const Date> dates, std::span<const double> predictions);

/// Feature name and Pearson r, "n/a" when undefined.
std::string correlation_table_text(std::span<const features::Correlation> correlations);

/// Self-contained SVG line chart of actual vs predicted energy.  Output is a
/// pure function of its input.
std::string series_svg(std::span<const eval::SeriesPoint> series, const std::string& title);

}  // namespace hotelwatt::report
