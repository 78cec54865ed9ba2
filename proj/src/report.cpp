#include "effdim/report.hpp"

#include <cmath>
#include <sstream>

#include "effdim/csv.hpp"

namespace effdim::report {
namespace {

void write_value(std::ostringstream& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(it.key()).dump() << ": ";
        write_value(out, it.value(), depth + 1);
      }
      out << '\n' << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out << ",\n";
        first = false;
        out << pad;
        write_value(out, v, depth + 1);
      }
      out << '\n' << close_pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out << (std::isfinite(x) ? csv::format_double(x) : std::string("null"));
      return;
    }
    default:
      out << j.dump();
  }
}

void flatten(const Json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_number_float()) {
    const double x = j.get<double>();
    out << prefix << ',' << (std::isfinite(x) ? csv::format_double(x) : std::string()) << '\n';
  } else if (j.is_string()) {
    out << prefix << ',' << j.get<std::string>() << '\n';
  } else if (j.is_null()) {
    out << prefix << ",\n";
  } else {
    out << prefix << ',' << j.dump() << '\n';
  }
}

}  // namespace

Json tagged(double value, std::string_view path) {
  Json j;
  j["value"] = value;
  j["path"] = std::string(path);
  return j;
}

Json tagged(const std::vector<double>& values, std::string_view path) {
  Json j;
  j["values"] = values;
  j["path"] = std::string(path);
  return j;
}

Json tagged_count(std::int64_t value, std::string_view path) {
  Json j;
  j["value"] = value;
  j["path"] = std::string(path);
  return j;
}

Json estimate(const McEstimate& e) {
  Json j;
  j["value"] = e.estimate;
  j["std_error"] = e.std_error;
  j["n_samples"] = e.n_samples;
  if (e.inner_samples) j["inner_samples"] = *e.inner_samples;
  j["seed"] = e.seed;
  j["path"] = std::string(kMonteCarlo);
  return j;
}

std::string dump(const Json& j) {
  std::ostringstream out;
  write_value(out, j, 0);
  out << '\n';
  return out.str();
}

std::string dump_csv(const Json& j) {
  std::ostringstream out;
  out << "key,value\n";
  flatten(j, "", out);
  return out.str();
}

}  // namespace effdim::report
