#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bipartite_lens/error.hpp"
#include "bipartite_lens/graph.hpp"

namespace bipartite_lens {

/// One cooperation project between a firm and a research organization.
struct ProjectRecord {
  std::string project_id;
  std::string firm_id;
  std::string org_id;
  int start_year = 0;

  friend bool operator==(const ProjectRecord&, const ProjectRecord&) = default;
};

enum class RecordErrorKind {
  EmptyField,
  BadYear,
  YearOutOfRange,
  FieldCount,
  BadQuoting,
  BadJson,
  MissingField,
  WrongType,
  DuplicateId,
};

constexpr std::string_view to_string(RecordErrorKind k) noexcept {
  switch (k) {
    case RecordErrorKind::EmptyField: return "empty_field";
    case RecordErrorKind::BadYear: return "bad_year";
    case RecordErrorKind::YearOutOfRange: return "year_out_of_range";
    case RecordErrorKind::FieldCount: return "field_count";
    case RecordErrorKind::BadQuoting: return "bad_quoting";
    case RecordErrorKind::BadJson: return "bad_json";
    case RecordErrorKind::MissingField: return "missing_field";
    case RecordErrorKind::WrongType: return "wrong_type";
    case RecordErrorKind::DuplicateId: return "duplicate_id";
  }
  return "unknown";
}

/// A rejected input row. `line` counts data lines from 1; for CSV the header
/// line is not counted, so the first row after the header is line 1.
struct RecordError {
  std::size_t line = 0;
  RecordErrorKind kind = RecordErrorKind::EmptyField;
  std::string detail;
};

enum class InputFormat { Csv, JsonLines };

struct ParseOptions {
  int min_year = 1900;
  int max_year = 2100;
};

struct ParseResult {
  std::vector<ProjectRecord> records;
  std::vector<RecordError> errors;
  /// JSON Lines rows that carried keys beyond the four known ones.
  std::size_t unknown_key_rows = 0;

  std::size_t row_count() const noexcept { return records.size() + errors.size(); }
};

inline constexpr std::string_view kCsvHeader = "project_id,firm_id,org_id,start_year";

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF))
      return false;
    i += len;
  }
  return true;
}

/// Splits one CSV line, honoring RFC 4180 double-quoted fields. Returns
/// nullopt on an unterminated or misplaced quote.
inline std::optional<std::vector<std::string>> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == ',') {
      fields.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else if (ch == '"') {
      if (was_quoted || !trim(cur).empty()) return std::nullopt;
      cur.clear();
      quoted = was_quoted = true;
    } else if (was_quoted) {
      if (ch != ' ' && ch != '\t') return std::nullopt;
    } else {
      cur += ch;
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(was_quoted ? cur : std::string(trim(cur)));
  for (auto& f : fields) f = std::string(trim(f));
  return fields;
}

inline void write_csv_field(std::ostream& os, std::string_view f) {
  if (f.find_first_of(",\"\r\n") == std::string_view::npos) {
    os << f;
    return;
  }
  os << '"';
  for (char c : f) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

inline std::optional<RecordError> parse_year(std::string_view text, const ParseOptions& opt, std::size_t line,
                                             int& year) {
  text = trim(text);
  if (text.empty()) return RecordError{line, RecordErrorKind::EmptyField, "start_year is empty"};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), year);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    return RecordError{line, RecordErrorKind::BadYear, "start_year '" + std::string(text) + "' is not an integer"};
  if (year < opt.min_year || year > opt.max_year)
    return RecordError{line, RecordErrorKind::YearOutOfRange, "start_year " + std::to_string(year) + " outside [" +
                                                                  std::to_string(opt.min_year) + ", " +
                                                                  std::to_string(opt.max_year) + "]"};
  return std::nullopt;
}

inline std::optional<RecordError> check_ids(const ProjectRecord& r, std::size_t line) {
  const std::pair<std::string_view, const std::string*> fields[] = {
      {"project_id", &r.project_id}, {"firm_id", &r.firm_id}, {"org_id", &r.org_id}};
  for (auto [name, value] : fields)
    if (value->empty()) return RecordError{line, RecordErrorKind::EmptyField, std::string(name) + " is empty"};
  return std::nullopt;
}

inline std::variant<ProjectRecord, RecordError> parse_csv_row(std::string_view text, std::size_t line,
                                                             const ParseOptions& opt) {
  auto fields = split_csv(text);
  if (!fields) return RecordError{line, RecordErrorKind::BadQuoting, "unbalanced or misplaced quote"};
  if (fields->size() != 4)
    return RecordError{line, RecordErrorKind::FieldCount,
                       "expected 4 fields, found " + std::to_string(fields->size())};
  ProjectRecord r{(*fields)[0], (*fields)[1], (*fields)[2], 0};
  if (auto e = check_ids(r, line)) return *e;
  if (auto e = parse_year((*fields)[3], opt, line, r.start_year)) return *e;
  return r;
}

inline std::variant<ProjectRecord, RecordError> parse_json_row(std::string_view text, std::size_t line,
                                                              const ParseOptions& opt, bool& unknown_keys) {
  using nlohmann::json;
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return RecordError{line, RecordErrorKind::BadJson, "not a JSON object"};

  ProjectRecord r;
  std::pair<const char*, std::string*> ids[] = {
      {"project_id", &r.project_id}, {"firm_id", &r.firm_id}, {"org_id", &r.org_id}};
  for (auto [key, dest] : ids) {
    auto it = j.find(key);
    if (it == j.end()) return RecordError{line, RecordErrorKind::MissingField, std::string("missing key ") + key};
    if (!it->is_string())
      return RecordError{line, RecordErrorKind::WrongType, std::string(key) + " must be a string"};
    *dest = std::string(trim(it->get_ref<const std::string&>()));
  }
  if (auto e = check_ids(r, line)) return *e;

  auto y = j.find("start_year");
  if (y == j.end()) return RecordError{line, RecordErrorKind::MissingField, "missing key start_year"};
  if (y->is_number_integer()) {
    const auto v = y->get<std::int64_t>();
    if (v < opt.min_year || v > opt.max_year)
      return RecordError{line, RecordErrorKind::YearOutOfRange, "start_year " + std::to_string(v) + " out of range"};
    r.start_year = static_cast<int>(v);
  } else if (y->is_string()) {
    if (auto e = parse_year(y->get_ref<const std::string&>(), opt, line, r.start_year)) return *e;
  } else {
    return RecordError{line, RecordErrorKind::BadYear, "start_year must be an integer"};
  }

  unknown_keys = j.size() > 4;
  return r;
}

}  // namespace detail

/// Reads project records. Malformed rows become RecordError values; the
/// call only throws (UnreadableInput) for stream-level problems: a failed
/// stream, invalid UTF-8, or a CSV whose first line is not the header.
/// An entirely empty CSV stream is accepted as an empty dataset.
///
/// Later rows reusing a project_id are rejected as DuplicateId.
inline ParseResult parse_records(std::istream& in, InputFormat format, const ParseOptions& opt = {}) {
  if (!in) throw UnreadableInput("input stream is not readable");
  ParseResult out;
  std::unordered_set<std::string> seen_ids;
  std::string raw;
  std::size_t physical = 0;
  bool header_seen = format == InputFormat::JsonLines;

  while (std::getline(in, raw)) {
    ++physical;
    if (physical == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.erase(0, 3);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (!detail::valid_utf8(raw)) throw UnreadableInput("line " + std::to_string(physical) + " is not valid UTF-8");

    if (!header_seen) {
      auto fields = detail::split_csv(raw);
      std::string joined;
      if (fields)
        for (std::size_t i = 0; i < fields->size(); ++i) joined += (i ? "," : "") + (*fields)[i];
      if (joined != kCsvHeader)
        throw UnreadableInput("expected CSV header '" + std::string(kCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    const std::size_t line = format == InputFormat::Csv ? physical - 1 : physical;
    if (detail::trim(raw).empty()) continue;

    bool unknown = false;
    auto row = format == InputFormat::Csv ? detail::parse_csv_row(raw, line, opt)
                                          : detail::parse_json_row(raw, line, opt, unknown);
    if (auto* e = std::get_if<RecordError>(&row)) {
      out.errors.push_back(std::move(*e));
      continue;
    }
    auto& rec = std::get<ProjectRecord>(row);
    if (!seen_ids.insert(rec.project_id).second) {
      out.errors.push_back({line, RecordErrorKind::DuplicateId, "project_id '" + rec.project_id + "' repeats"});
      continue;
    }
    if (unknown) ++out.unknown_key_rows;
    out.records.push_back(std::move(rec));
  }
  if (in.bad()) throw UnreadableInput("read failure");
  return out;
}

/// Canonical CSV: header row, LF endings, fields quoted only when needed.
inline void write_records_csv(std::ostream& os, std::span<const ProjectRecord> records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    detail::write_csv_field(os, r.project_id);
    os << ',';
    detail::write_csv_field(os, r.firm_id);
    os << ',';
    detail::write_csv_field(os, r.org_id);
    os << ',' << r.start_year << '\n';
  }
}

/// Ever-cooperated graph: {f, o} is an edge iff some record pairs them.
inline BipartiteGraph build_static_graph(std::span<const ProjectRecord> records) {
  GraphBuilder b;
  for (const auto& r : records) b.add_edge(r.firm_id, r.org_id);
  return b.build();
}

/// Per (firm, org) pair, the sorted multiset of project start years, plus a
/// per-year index of the pairs active in that year. Node ids are interned in
/// ascending order, matching BipartiteGraph's indexing.
class TimedEdgeStore {
public:
  struct Pair {
    NodeIndex firm;
    NodeIndex org;
    friend auto operator<=>(const Pair&, const Pair&) = default;
  };

  TimedEdgeStore() = default;

  static TimedEdgeStore build(std::span<const ProjectRecord> records) {
    TimedEdgeStore s;
    for (const auto& r : records) {
      s.firm_ids_.push_back(r.firm_id);
      s.org_ids_.push_back(r.org_id);
    }
    sort_unique(s.firm_ids_);
    sort_unique(s.org_ids_);

    std::vector<std::tuple<NodeIndex, NodeIndex, int>> occ;
    occ.reserve(records.size());
    for (const auto& r : records) occ.emplace_back(*s.index_of(s.firm_ids_, r.firm_id),
                                                   *s.index_of(s.org_ids_, r.org_id), r.start_year);
    s.assign(std::move(occ));
    return s;
  }

  bool empty() const noexcept { return pairs_.empty(); }
  /// Undefined (nullopt) for an empty store.
  std::optional<std::pair<int, int>> year_range() const noexcept { return range_; }

  std::span<const std::string> firm_ids() const noexcept { return firm_ids_; }
  std::span<const std::string> org_ids() const noexcept { return org_ids_; }
  std::span<const Pair> pairs() const noexcept { return pairs_; }
  std::size_t occurrence_count() const noexcept { return years_flat_.size(); }

  /// Start years for pair index `p`, ascending, with multiplicity.
  std::span<const int> pair_years(std::size_t p) const {
    return std::span<const int>(years_flat_).subspan(year_offsets_[p], year_offsets_[p + 1] - year_offsets_[p]);
  }

  std::optional<std::size_t> find_pair(std::string_view firm_id, std::string_view org_id) const {
    auto f = index_of(firm_ids_, firm_id);
    auto o = index_of(org_ids_, org_id);
    if (!f || !o) return std::nullopt;
    const Pair key{*f, *o};
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), key);
    if (it == pairs_.end() || *it != key) return std::nullopt;
    return static_cast<std::size_t>(it - pairs_.begin());
  }

  /// Empty span when the pair never cooperated.
  std::span<const int> years_of(std::string_view firm_id, std::string_view org_id) const {
    auto p = find_pair(firm_id, org_id);
    return p ? pair_years(*p) : std::span<const int>{};
  }

  /// Distinct pair indices with at least one project starting in `year`.
  std::span<const std::uint32_t> pairs_in_year(int year) const {
    auto it = year_index_.find(year);
    if (it == year_index_.end()) return {};
    return it->second;
  }

  const std::map<int, std::vector<std::uint32_t>>& year_index() const noexcept { return year_index_; }

  /// Copy with every occurrence in `year` dropped. The node universe is kept.
  TimedEdgeStore without_year(int year) const {
    TimedEdgeStore s;
    s.firm_ids_ = firm_ids_;
    s.org_ids_ = org_ids_;
    std::vector<std::tuple<NodeIndex, NodeIndex, int>> occ;
    for (std::size_t p = 0; p < pairs_.size(); ++p)
      for (int y : pair_years(p))
        if (y != year) occ.emplace_back(pairs_[p].firm, pairs_[p].org, y);
    s.assign(std::move(occ));
    return s;
  }

private:
  static void sort_unique(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  static std::optional<NodeIndex> index_of(const std::vector<std::string>& ids, std::string_view id) {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<NodeIndex>(it - ids.begin());
  }

  void assign(std::vector<std::tuple<NodeIndex, NodeIndex, int>> occ) {
    std::sort(occ.begin(), occ.end());
    pairs_.clear();
    years_flat_.clear();
    year_offsets_.assign(1, 0);
    year_index_.clear();
    range_.reset();
    for (auto [f, o, y] : occ) {
      const Pair key{f, o};
      if (pairs_.empty() || pairs_.back() != key) {
        if (!pairs_.empty()) year_offsets_.push_back(years_flat_.size());
        pairs_.push_back(key);
      }
      const auto p = static_cast<std::uint32_t>(pairs_.size() - 1);
      auto& in_year = year_index_[y];
      if (in_year.empty() || in_year.back() != p) in_year.push_back(p);
      years_flat_.push_back(y);
      range_ = range_ ? std::pair{std::min(range_->first, y), std::max(range_->second, y)} : std::pair{y, y};
    }
    if (!pairs_.empty()) year_offsets_.push_back(years_flat_.size());
  }

  std::vector<std::string> firm_ids_;
  std::vector<std::string> org_ids_;
  std::vector<Pair> pairs_;
  std::vector<std::size_t> year_offsets_{0};
  std::vector<int> years_flat_;
  std::map<int, std::vector<std::uint32_t>> year_index_;
  std::optional<std::pair<int, int>> range_;
};

inline TimedEdgeStore build_timed_store(std::span<const ProjectRecord> records) {
  return TimedEdgeStore::build(records);
}

/// Ever-cooperated graph over the store's full node universe.
inline BipartiteGraph build_static_graph(const TimedEdgeStore& store) {
  GraphBuilder b;
  for (const auto& id : store.firm_ids()) b.add_node(firm(id));
  for (const auto& id : store.org_ids()) b.add_node(org(id));
  for (auto p : store.pairs()) b.add_edge(store.firm_ids()[p.firm], store.org_ids()[p.org]);
  return b.build();
}

}  // namespace bipartite_lens
