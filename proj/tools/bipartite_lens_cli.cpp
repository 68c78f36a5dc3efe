// bipartite-lens: plot-data front end for two-mode collaboration records.
//
// Exit codes: 0 ok, 1 usage, 2 unreadable input or unwritable output,
// 3 too many malformed rows, 4 window outside the data range, 5 empty store,
// 6 invalid generator config, 7 internal error.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <bipartite_lens/bipartite_lens.hpp>

namespace bl = bipartite_lens;
using nlohmann::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kTooManyErrors = 3,
  kWindow = 4,
  kEmpty = 5,
  kConfig = 6,
  kInternal = 7,
};

struct Failure : std::runtime_error {
  Failure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
  int code;
};

// ---- logging ---------------------------------------------------------------

enum class Level { Error, Warn, Info, Debug };

Level log_level() {
  static const Level level = [] {
    const char* env = std::getenv("BIPARTITE_LENS_LOG");
    const std::string_view v = env ? env : "";
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
  }();
  return level;
}

void log(Level level, std::string_view msg) {
  if (level > log_level()) return;
  static constexpr std::string_view tags[] = {"error", "warn", "info", "debug"};
  std::cerr << "bipartite-lens: " << tags[static_cast<int>(level)] << ": " << msg << '\n';
}

// ---- IO --------------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Failure(kInternal, "sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string read_all(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kIo, "cannot open '" + path + "'");
  std::string bytes{std::istreambuf_iterator<char>(in), {}};
  if (in.bad()) throw Failure(kIo, "cannot read '" + path + "'");
  return bytes;
}

bool to_stdout(const std::string& path) { return path.empty() || path == "-"; }

void emit(const std::string& path, const std::string& data) {
  if (to_stdout(path)) {
    std::cout << data << std::flush;
    if (!std::cout) throw Failure(kIo, "write to stdout failed");
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << data;
  os.close();
  if (!os) throw Failure(kIo, "cannot write '" + path + "'");
  log(Level::Info, "wrote " + path);
}

// ---- shared options --------------------------------------------------------

struct Common {
  std::string input;
  std::string format;
  std::string manifest;
  double max_error_rate = 0.10;
};

struct Manifest {
  std::string command;
  json parameters = json::object();
  json inputs = json::array();
  json outputs = json::array();

  void output(const std::string& path, const std::string& data) {
    outputs.push_back({{"path", to_stdout(path) ? "-" : path}, {"sha256", sha256_hex(data)}});
  }

  void write(const std::string& path) const {
    if (path.empty()) return;
    json j{{"command", command},
           {"parameters", parameters},
           {"inputs", inputs},
           {"outputs", outputs},
           {"tool_version", std::string(bl::kVersion)}};
    emit(path, j.dump(2) + "\n");
  }
};

void add_input_options(CLI::App* cmd, Common& c) {
  cmd->add_option("input", c.input, "Project records (CSV or JSON Lines; - for stdin)")->required();
  cmd->add_option("--format", c.format, "Input format, overriding detection")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--max-error-rate", c.max_error_rate, "Fail with exit 3 above this fraction of malformed rows")
      ->capture_default_str();
  cmd->add_option("--manifest", c.manifest, "Write a run manifest (JSON) to this path");
}

bl::InputFormat detect_format(const Common& c, std::string_view bytes) {
  if (c.format == "csv") return bl::InputFormat::Csv;
  if (c.format == "jsonl") return bl::InputFormat::JsonLines;
  for (std::string_view ext : {".jsonl", ".ndjson", ".json"})
    if (c.input.ends_with(ext)) return bl::InputFormat::JsonLines;
  if (c.input.ends_with(".csv")) return bl::InputFormat::Csv;
  const auto first = bytes.find_first_not_of(" \t\r\n");
  return first != std::string_view::npos && bytes[first] == '{' ? bl::InputFormat::JsonLines : bl::InputFormat::Csv;
}

std::vector<bl::ProjectRecord> load(const Common& c, Manifest& m) {
  const std::string bytes = read_all(c.input);
  const auto format = detect_format(c, bytes);
  log(Level::Debug, std::string("format ") + (format == bl::InputFormat::Csv ? "csv" : "jsonl"));

  std::istringstream in(bytes);
  auto parsed = bl::parse_records(in, format);
  for (const auto& e : parsed.errors)
    log(Level::Debug, "line " + std::to_string(e.line) + ": " + std::string(bl::to_string(e.kind)) + ": " + e.detail);
  if (parsed.unknown_key_rows)
    log(Level::Info, std::to_string(parsed.unknown_key_rows) + " rows carried unknown keys");

  const auto rows = parsed.row_count();
  if (!parsed.errors.empty())
    log(Level::Warn, std::to_string(parsed.errors.size()) + " of " + std::to_string(rows) + " rows rejected");
  if (rows > 0 && static_cast<double>(parsed.errors.size()) > c.max_error_rate * static_cast<double>(rows))
    throw Failure(kTooManyErrors, "malformed rows exceed the error threshold");
  log(Level::Info, std::to_string(parsed.records.size()) + " records from " + c.input);

  m.inputs.push_back({{"path", c.input}, {"sha256", sha256_hex(bytes)}, {"record_errors", parsed.errors.size()}});
  m.parameters["format"] = format == bl::InputFormat::Csv ? "csv" : "jsonl";
  m.parameters["max_error_rate"] = c.max_error_rate;
  return std::move(parsed.records);
}

// ---- commands --------------------------------------------------------------

struct SummaryArgs {
  Common common;
  bool text = false;
};

int run_summary(const SummaryArgs& a) {
  Manifest m{"summary"};
  auto records = load(a.common, m);
  const auto record_errors = m.inputs.back()["record_errors"].get<std::uint64_t>();
  const auto s = bl::mode_summary(bl::build_static_graph(records));

  const std::pair<std::string_view, std::uint64_t> fields[] = {
      {"firms", s.firm_count},           {"orgs", s.org_count},
      {"edges", s.edge_count},           {"records", records.size()},
      {"record_errors", record_errors},  {"firm_max_degree", s.firm_max_degree},
      {"org_max_degree", s.org_max_degree},
  };
  std::ostringstream os;
  if (a.text) {
    for (auto [k, v] : fields) os << std::left << std::setw(16) << k << v << '\n';
  } else {
    json j = json::object();
    for (auto [k, v] : fields) j[std::string(k)] = v;
    os << j.dump(2) << '\n';
  }
  m.parameters["text"] = a.text;
  m.output("-", os.str());
  emit("-", os.str());
  m.write(a.common.manifest);
  return kOk;
}

struct RankSizeArgs {
  Common common;
  std::string mode = "firm";
  std::string output;
  bool fit = false;
  std::string fit_output;
};

int run_ranksize(const RankSizeArgs& a) {
  std::string fit_path = a.fit_output;
  if (a.fit && fit_path.empty()) {
    if (to_stdout(a.output)) throw Failure(kUsage, "--fit with CSV on stdout needs --fit-out");
    fit_path = a.output + ".fit.json";
  }

  Manifest m{"ranksize"};
  auto records = load(a.common, m);
  const auto mode = a.mode == "org" ? bl::Mode::ResearchOrg : bl::Mode::Firm;
  const auto dist = bl::rank_size(bl::build_static_graph(records), mode);

  std::ostringstream csv;
  bl::write_rank_size_csv(csv, dist);
  m.parameters["mode"] = a.mode;
  m.parameters["fit"] = a.fit;
  emit(a.output, csv.str());
  m.output(a.output, csv.str());

  if (a.fit) {
    std::vector<std::uint64_t> degrees;
    for (const auto& e : dist.entries)
      if (e.degree > 0) degrees.push_back(e.degree);
    json j;
    try {
      j = bl::fit_to_json(bl::fit_power_law(degrees));
    } catch (const bl::InsufficientData& e) {
      log(Level::Warn, std::string("power-law fit skipped: ") + e.what());
      j = {{"error", "insufficient_data"}};
    }
    const std::string body = j.dump(2) + "\n";
    emit(fit_path, body);
    m.output(fit_path, body);
  }
  m.write(a.common.manifest);
  return kOk;
}

struct RaArgs {
  Common common;
  std::optional<int> from;
  std::optional<int> to;
};

int run_ra(const RaArgs& a) {
  Manifest m{"ra"};
  auto records = load(a.common, m);
  bl::ClusteringCensus census;
  if (a.from || a.to) {
    const auto store = bl::build_timed_store(records);
    const auto range = store.year_range();
    if (!range) throw bl::WindowOutOfRange("no years in the data");
    const bl::WindowSpec w{a.from.value_or(range->first), a.to.value_or(range->second)};
    m.parameters["from"] = w.start_year;
    m.parameters["to"] = w.end_year;
    census = bl::clustering_census(bl::window_graph(store, w));
  } else {
    census = bl::clustering_census(bl::build_static_graph(records));
  }
  const std::string body = bl::census_to_json(census).dump(2) + "\n";
  emit("-", body);
  m.output("-", body);
  m.write(a.common.manifest);
  return kOk;
}

struct ScanArgs {
  Common common;
  std::string output;
  std::optional<int> exclude_year;
  bool mask_only = false;
  unsigned jobs = 0;
};

int run_scan(const ScanArgs& a) {
  Manifest m{"scan"};
  auto records = load(a.common, m);
  const auto store = bl::build_timed_store(records);
  const auto matrix = bl::scan_all_windows(store, {a.exclude_year, a.mask_only, a.jobs});
  log(Level::Info, std::to_string(matrix.cell_count()) + " windows");

  std::ostringstream csv;
  bl::write_matrix_csv(csv, matrix);
  m.parameters["exclude_year"] = a.exclude_year ? json(*a.exclude_year) : json(nullptr);
  m.parameters["mask_only"] = a.mask_only;
  emit(a.output, csv.str());
  m.output(a.output, csv.str());
  m.write(a.common.manifest);
  return kOk;
}

// ---- generate --------------------------------------------------------------

struct GenerateArgs {
  std::string output;
  std::string manifest;
  std::uint64_t seed = 0;
  std::size_t orgs = 74;
  // pa / shift
  std::size_t projects = 10000;
  std::string years = "1992-2018";
  double new_firm_prob = 0.4;
  // shift
  int shift_year = 2008;
  std::size_t hot_firms = 8;
  std::size_t hot_orgs = 4;
  double hot_prob = 0.8;
  // er
  std::size_t firms = 100;
  double p = 0.05;
  int year = 2000;
};

std::pair<int, int> parse_years(std::string_view text) {
  const auto dash = text.find('-', 1);
  int a = 0, b = 0;
  auto whole = [](std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
  };
  if (dash == std::string_view::npos || !whole(text.substr(0, dash), a) || !whole(text.substr(dash + 1), b))
    throw bl::InvalidConfig("--years expects FIRST-LAST, got '" + std::string(text) + "'");
  return {a, b};
}

json config_json(const bl::GeneratorConfig& cfg) {
  json j{{"seed", cfg.seed},
         {"n_orgs", cfg.n_orgs},
         {"n_projects", cfg.n_projects},
         {"first_year", cfg.first_year},
         {"last_year", cfg.last_year},
         {"new_firm_prob", cfg.new_firm_prob}};
  if (cfg.shift)
    j["shift"] = {{"year", cfg.shift->year},
                  {"hot_firms", cfg.shift->hot_firms},
                  {"hot_orgs", cfg.shift->hot_orgs},
                  {"hot_prob", cfg.shift->hot_prob}};
  return j;
}

int run_generate(const std::string& kind, const GenerateArgs& a) {
  Manifest m{"generate " + kind};
  std::vector<bl::ProjectRecord> records;
  json effective;
  if (kind == "er") {
    effective = {{"generator", "er"}, {"seed", a.seed}, {"n_firms", a.firms},
                 {"n_orgs", a.orgs},  {"p", a.p},       {"year", a.year}};
    std::cerr << effective.dump() << '\n';
    records = bl::graph_to_records(bl::gen_er_bipartite(a.firms, a.orgs, a.p, a.seed), a.year);
  } else {
    bl::GeneratorConfig cfg;
    cfg.seed = a.seed;
    cfg.n_orgs = a.orgs;
    cfg.n_projects = a.projects;
    std::tie(cfg.first_year, cfg.last_year) = parse_years(a.years);
    cfg.new_firm_prob = a.new_firm_prob;
    if (kind == "shift") cfg.shift = bl::RegimeShift{a.shift_year, a.hot_firms, a.hot_orgs, a.hot_prob};
    effective = config_json(cfg);
    effective["generator"] = kind;
    std::cerr << effective.dump() << '\n';
    records = kind == "shift" ? bl::gen_regime_shift_stream(cfg) : bl::gen_pa_stream(cfg);
  }
  std::ostringstream csv;
  bl::write_records_csv(csv, records);
  emit(a.output, csv.str());
  m.parameters = effective;
  m.output(a.output, csv.str());
  m.write(a.manifest);
  return kOk;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const Failure& e) {
    log(Level::Error, e.what());
    return e.code;
  } catch (const bl::UnreadableInput& e) {
    log(Level::Error, e.what());
    return kIo;
  } catch (const bl::WindowOutOfRange& e) {
    log(Level::Error, e.what());
    return kWindow;
  } catch (const bl::EmptyStore& e) {
    log(Level::Error, e.what());
    return kEmpty;
  } catch (const bl::InvalidConfig& e) {
    log(Level::Error, e.what());
    return kConfig;
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode collaboration network statistics: rank-size, bipartite clustering, window scans."};
  app.set_version_flag("--version", std::string(bl::kVersion));
  app.require_subcommand(1);

  std::function<int()> action;

  SummaryArgs summary;
  auto* summary_cmd = app.add_subcommand("summary", "Node, edge and record counts");
  add_input_options(summary_cmd, summary.common);
  summary_cmd->add_flag("--text", summary.text, "Aligned text instead of JSON");
  summary_cmd->callback([&] { action = [&] { return run_summary(summary); }; });

  RankSizeArgs ranksize;
  auto* ranksize_cmd = app.add_subcommand("ranksize", "Rank-size CSV for one mode, optional power-law fit");
  add_input_options(ranksize_cmd, ranksize.common);
  ranksize_cmd->add_option("--mode", ranksize.mode, "firm or org")
      ->check(CLI::IsMember({"firm", "org"}))
      ->capture_default_str();
  ranksize_cmd->add_option("-o,--output", ranksize.output, "CSV path (default stdout)");
  ranksize_cmd->add_flag("--fit", ranksize.fit, "Also fit a discrete power law");
  ranksize_cmd->add_option("--fit-out", ranksize.fit_output, "Fit JSON path (default OUTPUT.fit.json)");
  ranksize_cmd->callback([&] { action = [&] { return run_ranksize(ranksize); }; });

  RaArgs ra;
  auto* ra_cmd = app.add_subcommand("ra", "Robins-Alexander census of the whole graph or one window");
  add_input_options(ra_cmd, ra.common);
  ra_cmd->add_option("--from", ra.from, "First year of the window");
  ra_cmd->add_option("--to", ra.to, "Last year of the window");
  ra_cmd->callback([&] { action = [&] { return run_ra(ra); }; });

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "Clustering matrix over every start/end year window");
  add_input_options(scan_cmd, scan.common);
  scan_cmd->add_option("-o,--output", scan.output, "CSV path (default stdout)");
  auto* exclude = scan_cmd->add_option("--exclude-year", scan.exclude_year, "Drop this year's projects and rescan");
  scan_cmd->add_flag("--mask-only", scan.mask_only, "Keep the data, blank coefficients of windows with the year")
      ->needs(exclude);
  scan_cmd->add_option("--jobs", scan.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  scan_cmd->callback([&] { action = [&] { return run_scan(scan); }; });

  auto* generate_cmd = app.add_subcommand("generate", "Synthetic corpora as canonical CSV");
  generate_cmd->require_subcommand(1);
  GenerateArgs er, pa, shift;
  shift.seed = 11;
  shift.projects = 6000;
  shift.years = "2000-2014";
  shift.new_firm_prob = 0.6;

  auto common_generate = [](CLI::App* cmd, GenerateArgs& g) {
    cmd->add_option("-o,--output", g.output, "CSV path (default stdout)");
    cmd->add_option("--manifest", g.manifest, "Write a run manifest (JSON) to this path");
    cmd->add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--orgs", g.orgs, "Research organizations")->capture_default_str();
  };
  auto stream_generate = [](CLI::App* cmd, GenerateArgs& g) {
    cmd->add_option("--projects", g.projects, "Project count")->capture_default_str();
    cmd->add_option("--years", g.years, "Year range FIRST-LAST")->capture_default_str();
    cmd->add_option("--new-firm-prob", g.new_firm_prob, "Chance a project brings a new firm")->capture_default_str();
  };

  auto* er_cmd = generate_cmd->add_subcommand("er", "Random bipartite graph, one record per edge");
  common_generate(er_cmd, er);
  er_cmd->add_option("--firms", er.firms, "Firms")->capture_default_str();
  er_cmd->add_option("--p", er.p, "Edge probability")->capture_default_str();
  er_cmd->add_option("--year", er.year, "Year stamped on every record")->capture_default_str();
  er_cmd->callback([&] { action = [&] { return run_generate("er", er); }; });

  auto* pa_cmd = generate_cmd->add_subcommand("pa", "Preferential-attachment project stream");
  common_generate(pa_cmd, pa);
  stream_generate(pa_cmd, pa);
  pa_cmd->callback([&] { action = [&] { return run_generate("pa", pa); }; });

  auto* shift_cmd = generate_cmd->add_subcommand("shift", "Preferential attachment plus a hot block in one year");
  common_generate(shift_cmd, shift);
  stream_generate(shift_cmd, shift);
  shift_cmd->add_option("--shift-year", shift.shift_year, "Year of the hot block")->capture_default_str();
  shift_cmd->add_option("--hot-firms", shift.hot_firms, "Firms in the hot block")->capture_default_str();
  shift_cmd->add_option("--hot-orgs", shift.hot_orgs, "Orgs in the hot block")->capture_default_str();
  shift_cmd->add_option("--hot-prob", shift.hot_prob, "Share of shift-year projects in the block")
      ->capture_default_str();
  shift_cmd->callback([&] { action = [&] { return run_generate("shift", shift); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  return action ? guarded(action) : kUsage;
}
