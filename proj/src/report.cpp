#include "conewave/report.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace conewave {

namespace {

void dump_string(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void dump_value(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw std::invalid_argument("canonical_dump: non-finite number");
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      break;
    }
    case Json::value_t::string:
      dump_string(j.get<std::string>(), out);
      break;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        dump_value(v, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::object: {
      // nlohmann's object is an ordered std::map, so iteration is sorted
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        dump_string(it.key(), out);
        out += ':';
        dump_value(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      throw std::invalid_argument("canonical_dump: unsupported value type");
  }
}

}  // namespace

std::string canonical_dump(const Json& j) {
  std::string out;
  dump_value(j, out);
  out += '\n';
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp.string());
    os.write(content.data(), std::streamsize(content.size()));
    if (!os) throw std::runtime_error("short write: " + tmp.string());
  }
  fs::rename(tmp, target);
}

Json check_to_json(const CheckRecord& r) {
  Json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["relation"] = r.relation;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  if (!r.location.empty()) j["location"] = r.location;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json certificate_to_json(const Certificate& c) {
  Json j;
  Json checks = Json::array();
  for (const auto& rec : c.checks) checks.push_back(check_to_json(rec));
  j["checks"] = checks;
  j["overall_pass"] = c.overall_pass;
  if (!c.error.empty()) j["error"] = c.error;
  if (c.h4_diagnostic) {
    const auto& d = *c.h4_diagnostic;
    Json dj;
    dj["sup"] = d.sup;
    dj["sup_t"] = d.sup_t;
    dj["increasing_at_t_max"] = d.increasing_at_t_max;
    if (d.first_crossing_t) dj["first_crossing_t"] = *d.first_crossing_t;
    if (d.extrapolated_crossing_t) dj["extrapolated_crossing_t"] = *d.extrapolated_crossing_t;
    j["h4_diagnostic"] = dj;
  }
  Json prov;
  prov["grid_nt"] = c.grid.nt;
  prov["grid_nx"] = c.grid.nx;
  prov["t_max"] = c.t_max;
  prov["h4_samples"] = c.h4_samples;
  prov["quadrature"] = c.quadrature;
  prov["strict_tol"] = c.options.strict_tol;
  prov["h1_samples"] = Json{{"t", c.options.h1_samples_t},
                            {"x", c.options.h1_samples_x},
                            {"u", c.options.h1_samples_u}};
  prov["h2_samples"] = c.options.h2_samples;
  j["provenance"] = prov;
  return j;
}

std::string certificate_to_text(const Certificate& c) {
  std::ostringstream os;
  os << "hypothesis certificate (t_max=" << c.t_max << ", grid " << c.grid.nt << "x" << c.grid.nx
     << ")\n";
  for (const auto& r : c.checks) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-34s %s  lhs=%.10g %s rhs=%.10g  slack=%.4g", r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.lhs, r.relation.c_str(), r.rhs, r.slack);
    os << buf;
    if (!r.location.empty()) os << "  at " << r.location;
    os << "\n";
  }
  if (c.h4_diagnostic) {
    const auto& d = *c.h4_diagnostic;
    os << "h4 growth diagnostic: sup=" << d.sup << " at t=" << d.sup_t
       << (d.increasing_at_t_max ? " (still increasing at t_max)" : " (settled before t_max)")
       << "\n";
    if (d.first_crossing_t) os << "  first violation of (i) at t=" << *d.first_crossing_t << "\n";
    if (d.extrapolated_crossing_t)
      os << "  quartic-growth fit predicts violation near t=" << *d.extrapolated_crossing_t
         << "\n";
  }
  if (!c.error.empty()) os << "aborted: " << c.error << "\n";
  os << "overall: " << (c.overall_pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace conewave
