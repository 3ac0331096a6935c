#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "rayleigh/harness.hpp"

namespace rayleigh {

namespace {

using json = nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::string s = fmt::format("{:.17g}", v);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? "\x01" + cur : cur);
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  out.push_back(was_quoted ? "\x01" + cur : cur);
  return out;
}

Cell parse_cell(const std::string& raw) {
  if (!raw.empty() && raw[0] == '\x01') return raw.substr(1);
  if (raw == "nan") return std::nan("");
  if (raw == "inf") return HUGE_VAL;
  if (raw == "-inf") return -HUGE_VAL;
  try {
    std::size_t used = 0;
    if (raw.find_first_of(".eE") == std::string::npos) {
      const long long v = std::stoll(raw, &used);
      if (used == raw.size()) return v;
    } else {
      const double v = std::stod(raw, &used);
      if (used == raw.size()) return v;
    }
  } catch (const std::exception&) {
  }
  return raw;
}

std::string csv_quote(const std::string& s) {
  // strings that would read back as numbers are quoted too
  if (s.find_first_of(",\"\n") == std::string::npos && !s.empty() && std::holds_alternative<std::string>(parse_cell(s)))
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return json{{"float", format_double(*d)}};
  }
  if (const long long* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

Cell json_cell(const json& j) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.contains("float")) return std::get<double>(parse_cell(j["float"].get<std::string>()));
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorCode::IoError, "unexpected JSON cell");
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw Error(ErrorCode::InvalidArgument, fmt::format("row has {} cells for {} columns", row.size(), columns.size()));
  rows.push_back(std::move(row));
}

std::string render(const Table& table, const std::string& format) {
  if (format == "csv") {
    std::ostringstream out;
    for (const auto& [k, v] : table.meta) out << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_quote(table.columns[i]);
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ",";
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) out << format_double(v);
              else if constexpr (std::is_same_v<T, long long>) out << v;
              else out << csv_quote(v);
            },
            row[i]);
      }
      out << "\n";
    }
    return out.str();
  }
  if (format == "json") {
    json j;
    j["meta"] = table.meta;
    j["columns"] = table.columns;
    j["rows"] = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(cell_json(c));
      j["rows"].push_back(r);
    }
    return j.dump(2) + "\n";
  }
  throw Error(ErrorCode::InvalidArgument, "format must be csv or json");
}

void emit_results(const Table& table, const std::string& format, const std::string& path) {
  const std::string text = render(table, format);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write to " + path + " failed");
}

Table read_results(const std::string& path, const std::string& format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  Table t;
  if (format == "csv") {
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (line.rfind("# ", 0) == 0) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) t.meta[line.substr(2, eq - 2)] = line.substr(eq + 3);
        continue;
      }
      if (line.empty()) continue;
      auto cells = csv_split(line);
      if (header) {
        for (auto& c : cells) t.columns.push_back(!c.empty() && c[0] == '\x01' ? c.substr(1) : c);
        header = false;
        continue;
      }
      std::vector<Cell> row;
      for (const auto& c : cells) row.push_back(parse_cell(c));
      t.add(std::move(row));
    }
    return t;
  }
  if (format == "json") {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IoError, e.what());
    }
    t.meta = j.value("meta", std::map<std::string, std::string>{});
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      std::vector<Cell> row;
      for (const auto& c : r) row.push_back(json_cell(c));
      t.add(std::move(row));
    }
    return t;
  }
  throw Error(ErrorCode::InvalidArgument, "format must be csv or json");
}

}  // namespace rayleigh
