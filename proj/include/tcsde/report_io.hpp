#pragma once

#include "tcsde/experiments.hpp"
#include "tcsde/model.hpp"
#include "tcsde/stochastic_clock.hpp"
#include "tcsde/theta_scheme.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tcsde {

inline constexpr int kSchemaVersion = 1;

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

CsvTable strong_error_csv(const StrongErrorReport& r);
CsvTable convergence_csv(const ConvergenceReport& r);
CsvTable stability_csv(const StabilityCurve& c);
CsvTable moments_csv(const std::vector<MomentRow>& rows);
CsvTable subordinator_csv(const SubordinatorPath& p);
CsvTable inverse_csv(const SubordinatorPath& p);
CsvTable trajectory_csv(const TrajectoryRecord& r);
CsvTable ml_csv(double alpha, const std::vector<double>& z, const std::vector<double>& values);
CsvTable validation_csv(const ValidationReport& r);
CsvTable bound_csv(const BoundReport& r);
CsvTable envelope_csv(const EnvelopeReport& r);

nlohmann::json to_json(const StrongErrorReport& r);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const StabilityThreshold& t);
nlohmann::json to_json(const StabilityCurve& c);
nlohmann::json to_json(const std::vector<MomentRow>& rows);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const EnvelopeReport& r);

}  // namespace tcsde
