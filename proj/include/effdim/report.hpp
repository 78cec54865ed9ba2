#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "effdim/monte_carlo.hpp"

namespace effdim::report {

using Json = nlohmann::ordered_json;

/// Computation path tags carried by every reported number.
inline constexpr std::string_view kClosedForm = "closed-form";
inline constexpr std::string_view kMonteCarlo = "mc";
inline constexpr std::string_view kBound = "bound";

Json tagged(double value, std::string_view path);
Json tagged(const std::vector<double>& values, std::string_view path);
Json tagged_count(std::int64_t value, std::string_view path);
Json estimate(const McEstimate& e);

/// Serializes with keys in insertion order, two-space indentation and every
/// floating value rendered with 17 significant digits. Non-finite values are
/// written as null.
std::string dump(const Json& j);

/// Flattens a report into "key,value" CSV lines with dotted keys.
std::string dump_csv(const Json& j);

}  // namespace effdim::report
