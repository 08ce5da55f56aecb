#include "tse/table_io.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>

namespace tse {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

namespace {

bool needs_quotes(const std::string& f) {
  return f.find_first_of(",\"\n\r") != std::string::npos;
}

void append_field(std::string& out, const std::string& f) {
  if (!needs_quotes(f)) {
    out += f;
    return;
  }
  out += '"';
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    append_field(out, fields[i]);
  }
  out += '\n';
}

std::string opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

bool is_integer_text(const std::string& s) {
  std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace

std::string to_csv(const CsvTable& table) {
  std::string out;
  append_line(out, table.header);
  for (const auto& row : table.rows) append_line(out, row);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool line_open = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    line_open = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      field.clear();
      lines.push_back(std::move(fields));
      fields.clear();
      line_open = false;
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw Error(ErrorKind::InvalidArgument, "unterminated quoted CSV field");
  }
  if (line_open) {
    fields.push_back(std::move(field));
    lines.push_back(std::move(fields));
  }
  if (lines.empty()) {
    throw Error(ErrorKind::InvalidArgument, "CSV input has no header");
  }
  CsvTable table;
  table.header = std::move(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != table.header.size()) {
      throw Error(ErrorKind::InvalidArgument,
                  "CSV row " + std::to_string(i) + " has " +
                      std::to_string(lines[i].size()) + " fields, expected " +
                      std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(lines[i]));
  }
  return table;
}

std::string to_json(const CsvTable& table) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      const std::string& f = row[i];
      auto& slot = obj[table.header[i]];
      if (f.empty()) {
        slot = nullptr;
      } else if (is_integer_text(f)) {
        slot = std::stoll(f);
      } else if (const auto d = parse_double(f); d && std::isfinite(*d)) {
        slot = *d;
      } else {
        slot = f;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

CsvTable trajectory_table(const std::vector<RawState>& states) {
  CsvTable t;
  t.header = {"k", "p0", "p1", "p2"};
  t.rows.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    t.rows.push_back({std::to_string(k), format_double(states[k][0]),
                      format_double(states[k][1]),
                      format_double(states[k][2])});
  }
  return t;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  CsvTable t;
  t.header = {"v0",       "v1",
              "v2",       "coordinate",
              "rho_m",    "v_m",
              "scenario", "predicted_limit",
              "contraction_factor", "simulated_limit",
              "agreement", "flags"};
  for (const auto& r : rows) {
    std::string flags;
    for (const auto& f : r.flags) {
      if (!flags.empty()) flags += ';';
      flags += f;
    }
    t.rows.push_back({format_double(r.params[0]), format_double(r.params[1]),
                      format_double(r.params[2]), std::to_string(r.coordinate),
                      opt(r.rho_m), format_double(r.v_m), r.scenario,
                      r.predicted_limit, opt(r.contraction_factor),
                      opt(r.simulated_limit), r.agreement, flags});
  }
  return t;
}

CsvTable replication_table(const std::vector<EmpiricalTrajectory>& runs) {
  CsvTable t;
  t.header = {"replication", "k", "p0", "p1", "p2"};
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < run.states.size(); ++k) {
      const auto& s = run.states[k];
      t.rows.push_back({std::to_string(run.replication), std::to_string(k),
                        format_double(s[0]), format_double(s[1]),
                        format_double(s[2])});
    }
  }
  return t;
}

CsvTable deviation_table(const std::vector<DeviationRow>& rows) {
  CsvTable t;
  t.header = {"n", "median_max_deviation", "replications"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.n), format_double(r.median_max_deviation),
                      std::to_string(r.replications)});
  }
  return t;
}

}  // namespace tse
