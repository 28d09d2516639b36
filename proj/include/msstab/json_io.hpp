#pragma once

// JSON (de)serialization for system definitions, certificates, search
// results, gains and simulation summaries. Config errors carry the JSON
// path of the offending field.

#include "msstab/clock_conditions.hpp"
#include "msstab/dwell_search.hpp"
#include "msstab/simulate.hpp"
#include "msstab/synthesis.hpp"
#include "msstab/system.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace msstab {

// Configuration/schema violation; `path` localizes the problem ("system.J").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

using nlohmann::json;

json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j, const std::string& path);

using AnySystem = std::variant<ImpulsiveSystem, SwitchedSystem, SampledDataSystem>;

// Parse the "system" block of a config. Dimensional problems are reported
// as ConfigError with the field path.
AnySystem system_from_json(const json& j, const std::string& path = "system");
json system_to_json(const AnySystem& sys);

DwellTimeSpec dwell_from_json(const json& j, const std::string& path);
json dwell_to_json(const DwellTimeSpec& spec);

json certificate_to_json(const StabilityCertificate& cert);
json search_to_json(const SearchResult& res);
json gains_to_json(const ControllerGains& gains);
json synthesis_to_json(const SynthesisResult& res);
json pwl_to_json(const PwlMatrixFunction& f);

} // namespace msstab
