#include "tiedpools/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "tiedpools/errors.hpp"

namespace tiedpools {

namespace {

using nlohmann::json;

struct Field {
  std::string text;
  std::size_t column;  // 1-based column of the field's first character
};

std::vector<Field> split_csv_line(std::string_view line, const std::string& source,
                                  std::size_t line_no) {
  std::vector<Field> fields;
  std::size_t i = 0;
  while (true) {
    Field f{{}, i + 1};
    while (i < line.size() && line[i] == ' ') ++i;
    if (i < line.size() && line[i] == '"') {
      const std::size_t open = i++;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            f.text += '"';
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        f.text += line[i++];
      }
      if (!closed) throw ParseError(source, line_no, open + 1, "unterminated quoted field");
      while (i < line.size() && line[i] == ' ') ++i;
      if (i < line.size() && line[i] != ',') {
        throw ParseError(source, line_no, i + 1, "unexpected character after quoted field");
      }
    } else {
      while (i < line.size() && line[i] != ',') f.text += line[i++];
      while (!f.text.empty() && (f.text.back() == ' ' || f.text.back() == '\t')) f.text.pop_back();
    }
    fields.push_back(std::move(f));
    if (i >= line.size()) break;
    ++i;  // comma
  }
  return fields;
}

double parse_count(const Field& f, const std::string& source, std::size_t line_no,
                   const char* what) {
  double v = 0;
  const char* begin = f.text.data();
  const char* end = begin + f.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (f.text.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(source, line_no, f.column,
                     std::string("expected a number for ") + what + ", got '" + f.text + "'");
  }
  if (!std::isfinite(v) || v < 0) {
    throw ParseError(source, line_no, f.column, std::string(what) + " must be non-negative");
  }
  return v;
}

std::pair<std::size_t, std::size_t> line_col_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is one past the offending character
    auto [line, col] = line_col_of(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(source, line, col, msg);
  }
}

[[noreturn]] void schema_error(const std::string& source, const std::string& msg) {
  throw ParseError(source, 0, 0, msg);
}

const json& member(const json& obj, const char* key, const std::string& source) {
  if (!obj.is_object()) schema_error(source, "top level must be a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(source, std::string("missing \"") + key + "\"");
  return *it;
}

std::vector<std::string> string_array(const json& v, const char* key, const std::string& source) {
  if (!v.is_array()) schema_error(source, std::string("\"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) schema_error(source, std::string("\"") + key + "\" must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Matrix square_matrix(const json& v, const char* key, std::size_t n, const std::string& source) {
  const std::string name = std::string("\"") + key + "\"";
  if (!v.is_array() || v.size() != n) {
    schema_error(source, name + " must be a " + std::to_string(n) + "x" + std::to_string(n) + " array");
  }
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_array() || v[i].size() != n) {
      schema_error(source, name + " row " + std::to_string(i + 1) + " must have " +
                               std::to_string(n) + " entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!v[i][j].is_number()) schema_error(source, name + " entries must be numbers");
      m(i, j) = v[i][j].get<double>();
    }
  }
  return m;
}

std::string extension_of(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

std::vector<MatchRecord> parse_match_csv(std::string_view text, const std::string& source) {
  static const char* const kRequired[] = {"player", "opponent", "wins", "losses", "draws"};
  std::vector<MatchRecord> records;
  std::map<std::string, std::size_t> col;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }

    const auto fields = split_csv_line(line, source, line_no);
    if (!have_header) {
      for (std::size_t k = 0; k < fields.size(); ++k) {
        std::string name = fields[k].text;
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (!col.emplace(name, k).second) {
          throw ParseError(source, line_no, fields[k].column, "duplicate column '" + name + "'");
        }
      }
      for (const char* req : kRequired) {
        if (!col.count(req)) {
          throw ParseError(source, line_no, 1, std::string("header is missing column '") + req + "'");
        }
      }
      have_header = true;
    } else {
      if (fields.size() != col.size()) {
        const std::size_t c = fields.size() < col.size() ? line.size() + 1
                                                         : fields[col.size()].column;
        throw ParseError(source, line_no, c,
                         "expected " + std::to_string(col.size()) + " fields, found " +
                             std::to_string(fields.size()));
      }
      MatchRecord r;
      r.player = fields[col["player"]].text;
      r.opponent = fields[col["opponent"]].text;
      if (r.player.empty()) throw ParseError(source, line_no, fields[col["player"]].column, "empty player");
      if (r.opponent.empty()) {
        throw ParseError(source, line_no, fields[col["opponent"]].column, "empty opponent");
      }
      r.wins = parse_count(fields[col["wins"]], source, line_no, "wins");
      r.losses = parse_count(fields[col["losses"]], source, line_no, "losses");
      r.draws = parse_count(fields[col["draws"]], source, line_no, "draws");
      if (auto it = col.find("handicap"); it != col.end()) r.handicap = fields[it->second].text;
      records.push_back(std::move(r));
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw ParseError(source, 1, 1, "no comparisons: missing header row");
  return records;
}

ComparisonData parse_matrix_json(std::string_view text, const std::string& source) {
  const json doc = parse_json(text, source);
  auto players = string_array(member(doc, "players", source), "players", source);
  const std::size_t n = players.size();
  Matrix wins = square_matrix(member(doc, "wins", source), "wins", n, source);
  Matrix draws = square_matrix(member(doc, "draws", source), "draws", n, source);
  return ComparisonData(std::move(players), std::move(wins), std::move(draws));
}

PoolCounts parse_pool_json(std::string_view text, const std::string& source) {
  const json doc = parse_json(text, source);
  const auto players = string_array(member(doc, "players", source), "players", source);
  const json& wins = member(doc, "round_wins", source);
  if (players.size() != 3) schema_error(source, "\"players\" must list exactly 3 players");
  if (!wins.is_array() || wins.size() != 3) {
    schema_error(source, "\"round_wins\" must hold exactly 3 counts");
  }
  PoolCounts counts;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!wins[i].is_number()) schema_error(source, "\"round_wins\" entries must be numbers");
    counts.labels[i] = players[i];
    counts.wins[i] = wins[i].get<double>();
  }
  return counts;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ComparisonData load_comparisons(const std::string& path) {
  const std::string text = read_file(path);
  const std::string ext = extension_of(path);
  if (ext == "csv") {
    const auto records = parse_match_csv(text, path);
    return from_match_records(records);
  }
  if (ext == "json") return parse_matrix_json(text, path);
  throw ValidationError("unsupported input '" + path + "' (expected .csv or .json)");
}

PoolCounts load_pool_counts(const std::string& path) {
  return parse_pool_json(read_file(path), path);
}

}  // namespace tiedpools
