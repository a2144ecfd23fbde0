#pragma once

#include "distdelay/analysis.hpp"
#include "distdelay/counterexample.hpp"
#include "distdelay/delay_measure.hpp"
#include "distdelay/integrator.hpp"

#include <json.hpp>

#include <string>

namespace distdelay {

inline constexpr const char* kArtifactVersion = "1.0.0";

nlohmann::json to_json(const FunctionDescriptor& d);
nlohmann::json to_json(const StabilityReport& rep);
nlohmann::json to_json(const TailStatistics& tail);
nlohmann::json to_json(const StepStats& stats);
nlohmann::json to_json(const DelayMeasure& m);
nlohmann::json to_json(const CounterexamplePrediction& p);
// {switch_times, frozen_samples, predicted}
nlohmann::json schedule_json(const Counterexample& ce);

// Adds {version, config_hash} to an artifact.
nlohmann::json stamp(nlohmann::json j, const std::string& config_hash);

}  // namespace distdelay
