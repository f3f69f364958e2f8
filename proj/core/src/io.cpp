#include "ctns/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ctns/error.hpp"

namespace ctns {

namespace {

// ---- value formatting and parsing -------------------------------------------------

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // column of the value
};

using Section = std::map<std::string, Entry>;

double to_double(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError(key + ": expected a number, got '" + e.value + "' (line " +
                      std::to_string(e.line) + ")");
  return v;
}

long long to_int(const std::string& key, const Entry& e) {
  long long v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError(key + ": expected an integer, got '" + e.value + "' (line " +
                      std::to_string(e.line) + ")");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(std::string_view(s).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

std::vector<double> to_list(const std::string& key, const Entry& e) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) out.push_back(to_double(key, {item, e.line, 0}));
  return out;
}

template <class Enum>
Enum to_enum(const std::string& key, const Entry& e,
             const std::vector<std::pair<std::string, Enum>>& names) {
  for (const auto& [name, value] : names)
    if (e.value == name) return value;
  std::string allowed;
  for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + name;
  throw ConfigError(key + ": unknown value '" + e.value + "' (expected one of " + allowed + ")");
}

template <class Enum>
std::string enum_name(Enum v, const std::vector<std::pair<std::string, Enum>>& names) {
  for (const auto& [name, value] : names)
    if (value == v) return name;
  return "?";
}

const std::vector<std::pair<std::string, Limiter>> kLimiters{{"upwind", Limiter::Upwind},
                                                             {"minmod", Limiter::MinMod}};
const std::vector<std::pair<std::string, ConsumptionMode>> kConsumption{
    {"implicit", ConsumptionMode::ImplicitPointwise},
    {"explicit_clipped", ConsumptionMode::ExplicitClipped}};
const std::vector<std::pair<std::string, DensityInit>> kDensity{
    {"gaussian_bump", DensityInit::GaussianBump},
    {"uniform", DensityInit::Uniform},
    {"random", DensityInit::Random},
    {"snapshot", DensityInit::Snapshot}};
const std::vector<std::pair<std::string, SignalInit>> kSignal{{"uniform", SignalInit::Uniform},
                                                              {"random", SignalInit::Random},
                                                              {"snapshot", SignalInit::Snapshot}};
const std::vector<std::pair<std::string, VelocityInit>> kVelocity{
    {"zero", VelocityInit::Zero},
    {"vortex_pair", VelocityInit::VortexPair},
    {"random", VelocityInit::Random},
    {"snapshot", VelocityInit::Snapshot}};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"dim", "nx", "ny", "nz", "lx", "ly", "lz"}},
      {"coefficients",
       {"chi", "chi_points", "chi_values", "f", "f_points", "f_values", "phi", "phi_g",
        "phi_direction", "phi_file", "epsilon", "s_max"}},
      {"fluid", {"dt", "t_end", "epsilon", "cfl_max", "poisson_tol", "max_iters"}},
      {"transport", {"limiter", "consumption"}},
      {"initial",
       {"n", "n_background", "n_amplitude", "n_width", "n_center", "n_value", "c", "c_value", "u",
        "u_amplitude", "seed", "snapshot"}},
      {"monitors",
       {"kappa", "sigma_n", "sigma_c", "tol_c_rel", "tol_energy_rel", "ratio_tol", "entropy_p",
        "entropy_delta", "chi1", "mass_tol", "hard"}},
      {"output", {"record_every"}},
  };
  return s;
}

std::map<std::string, Section> tokenize(std::string_view text) {
  std::map<std::string, Section> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string line(raw);
    // Comments: '#' or ';' at line start or after whitespace.
    for (std::size_t i = 0; i < line.size(); ++i)
      if ((line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.resize(i);
        break;
      }
    const std::string t = trim(line);
    if (t.empty()) continue;
    const int indent = int(line.find_first_not_of(" \t")) + 1;

    if (t.front() == '[') {
      if (t.back() != ']')
        throw ParseError("unterminated section header", line_no, int(line.size()) + 1);
      current = trim(std::string_view(t).substr(1, t.size() - 2));
      if (!schema().count(current))
        throw ParseError("unknown section [" + current + "]", line_no, indent + 1);
      if (sections.count(current))
        throw ParseError("duplicate section [" + current + "]", line_no, indent);
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, indent);
    if (current.empty()) throw ParseError("key outside of a section", line_no, indent);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ParseError("missing key before '='", line_no, int(eq) + 1);
    for (std::size_t i = 0; i < key.size(); ++i) {
      const char ch = key[i];
      if (!((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_'))
        throw ParseError("invalid character in key '" + key + "'", line_no,
                         indent + int(i));
    }
    if (!schema().at(current).count(key))
      throw ParseError("unknown key '" + key + "' in [" + current + "]", line_no, indent);
    auto& sec = sections[current];
    if (auto it = sec.find(key); it != sec.end())
      throw ParseError("duplicate key '" + key + "' (first set on line " +
                           std::to_string(it->second.line) + ")",
                       line_no, indent);
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const int vcol = int(line.find_first_not_of(" \t", eq + 1)) + 1;
    sec[key] = Entry{value, line_no, value.empty() ? int(eq) + 2 : vcol};
  }
  return sections;
}

}  // namespace

// ---- configuration ---------------------------------------------------------------------

SimConfig parse_config(std::string_view text) {
  const auto sections = tokenize(text);
  for (const char* required : {"grid", "initial"})
    if (!sections.count(required))
      throw ConfigError(std::string("missing required section [") + required + "]");

  SimConfig c;
  auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  auto dbl = [&](const std::string& sec, const std::string& key, double& out) {
    if (auto e = get(sec, key)) out = to_double(sec + "." + key, *e);
  };
  auto integer = [&](const std::string& sec, const std::string& key, auto& out) {
    if (auto e = get(sec, key)) {
      const long long v = to_int(sec + "." + key, *e);
      out = static_cast<std::remove_reference_t<decltype(out)>>(v);
      if (static_cast<long long>(out) != v)
        throw ConfigError(sec + "." + key + ": value out of range");
    }
  };
  auto vec = [&](const std::string& sec, const std::string& key, std::vector<double>& out) {
    if (auto e = get(sec, key)) out = to_list(sec + "." + key, *e);
  };
  auto str = [&](const std::string& sec, const std::string& key, std::string& out) {
    if (auto e = get(sec, key)) out = e->value;
  };
  auto arr3 = [&](const std::string& sec, const std::string& key, std::array<double, 3>& out) {
    if (auto e = get(sec, key)) {
      const auto v = to_list(sec + "." + key, *e);
      if (v.size() < 2 || v.size() > 3)
        throw ConfigError(sec + "." + key + ": expected 2 or 3 components");
      out = {v[0], v[1], v.size() == 3 ? v[2] : out[2]};
    }
  };

  // [grid]
  if (!get("grid", "nx")) throw ConfigError("grid.nx: required key missing");
  if (!get("grid", "ny")) throw ConfigError("grid.ny: required key missing");
  integer("grid", "dim", c.grid.dim);
  integer("grid", "nx", c.grid.nx);
  integer("grid", "ny", c.grid.ny);
  integer("grid", "nz", c.grid.nz);
  dbl("grid", "lx", c.grid.lx);
  dbl("grid", "ly", c.grid.ly);
  dbl("grid", "lz", c.grid.lz);
  if (c.grid.dim == 3 && !get("grid", "nz")) throw ConfigError("grid.nz: required in 3D");

  // [coefficients]
  if (auto e = get("coefficients", "chi")) {
    if (e->value == "tabulated") {
      c.coefficients.chi = "tabulated";
    } else {
      c.coefficients.chi = "constant";
      c.coefficients.chi_value = to_double("coefficients.chi", *e);
    }
  }
  vec("coefficients", "chi_points", c.coefficients.chi_points);
  vec("coefficients", "chi_values", c.coefficients.chi_values);
  str("coefficients", "f", c.coefficients.f);
  vec("coefficients", "f_points", c.coefficients.f_points);
  vec("coefficients", "f_values", c.coefficients.f_values);
  str("coefficients", "phi", c.coefficients.phi);
  dbl("coefficients", "phi_g", c.coefficients.phi_g);
  arr3("coefficients", "phi_direction", c.coefficients.phi_direction);
  str("coefficients", "phi_file", c.coefficients.phi_file);
  vec("coefficients", "epsilon", c.coefficients.epsilon);
  dbl("coefficients", "s_max", c.coefficients.s_max);

  // [fluid]
  dbl("fluid", "dt", c.fluid.dt);
  dbl("fluid", "t_end", c.fluid.t_end);
  if (auto e = get("fluid", "epsilon"); e && e->value != "auto")
    c.fluid.epsilon = to_double("fluid.epsilon", *e);
  dbl("fluid", "cfl_max", c.fluid.cfl_max);
  dbl("fluid", "poisson_tol", c.fluid.poisson_tol);
  integer("fluid", "max_iters", c.fluid.max_iters);

  // [transport]
  if (auto e = get("transport", "limiter")) c.transport.limiter = to_enum("transport.limiter", *e, kLimiters);
  if (auto e = get("transport", "consumption"))
    c.transport.consumption = to_enum("transport.consumption", *e, kConsumption);

  // [initial]
  if (auto e = get("initial", "n")) c.initial.n = to_enum("initial.n", *e, kDensity);
  dbl("initial", "n_background", c.initial.n_background);
  dbl("initial", "n_amplitude", c.initial.n_amplitude);
  dbl("initial", "n_width", c.initial.n_width);
  arr3("initial", "n_center", c.initial.n_center);
  dbl("initial", "n_value", c.initial.n_value);
  if (auto e = get("initial", "c")) c.initial.c = to_enum("initial.c", *e, kSignal);
  dbl("initial", "c_value", c.initial.c_value);
  if (auto e = get("initial", "u")) c.initial.u = to_enum("initial.u", *e, kVelocity);
  dbl("initial", "u_amplitude", c.initial.u_amplitude);
  integer("initial", "seed", c.initial.seed);
  str("initial", "snapshot", c.initial.snapshot);

  // [monitors]
  dbl("monitors", "kappa", c.monitors.kappa);
  dbl("monitors", "sigma_n", c.monitors.sigma_n);
  dbl("monitors", "sigma_c", c.monitors.sigma_c);
  dbl("monitors", "tol_c_rel", c.monitors.tol_c_rel);
  dbl("monitors", "tol_energy_rel", c.monitors.tol_energy_rel);
  dbl("monitors", "ratio_tol", c.monitors.ratio_tol);
  vec("monitors", "entropy_p", c.monitors.entropy_p);
  dbl("monitors", "entropy_delta", c.monitors.entropy_delta);
  if (auto e = get("monitors", "chi1"); e && e->value != "auto")
    c.monitors.chi1 = to_double("monitors.chi1", *e);
  dbl("monitors", "mass_tol", c.monitors.mass_tol);
  if (auto e = get("monitors", "hard")) c.monitors.hard = split_list(e->value);

  // [output]
  integer("output", "record_every", c.output.record_every);

  c.validate();
  return c;
}

SimConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& c) {
  std::ostringstream o;
  auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
  o << "[grid]\n";
  kv("dim", std::to_string(c.grid.dim));
  kv("nx", std::to_string(c.grid.nx));
  kv("ny", std::to_string(c.grid.ny));
  kv("nz", std::to_string(c.grid.nz));
  kv("lx", num(c.grid.lx));
  kv("ly", num(c.grid.ly));
  kv("lz", num(c.grid.lz));

  const auto& k = c.coefficients;
  o << "\n[coefficients]\n";
  kv("chi", k.chi == "constant" ? num(k.chi_value) : "tabulated");
  if (!k.chi_points.empty()) kv("chi_points", list(k.chi_points));
  if (!k.chi_values.empty()) kv("chi_values", list(k.chi_values));
  kv("f", k.f);
  if (!k.f_points.empty()) kv("f_points", list(k.f_points));
  if (!k.f_values.empty()) kv("f_values", list(k.f_values));
  kv("phi", k.phi);
  kv("phi_g", num(k.phi_g));
  kv("phi_direction", list({k.phi_direction[0], k.phi_direction[1], k.phi_direction[2]}));
  if (!k.phi_file.empty()) kv("phi_file", k.phi_file);
  kv("epsilon", list(k.epsilon));
  kv("s_max", num(k.s_max));

  o << "\n[fluid]\n";
  kv("dt", num(c.fluid.dt));
  kv("t_end", num(c.fluid.t_end));
  kv("epsilon", c.fluid.epsilon ? num(*c.fluid.epsilon) : "auto");
  kv("cfl_max", num(c.fluid.cfl_max));
  kv("poisson_tol", num(c.fluid.poisson_tol));
  kv("max_iters", std::to_string(c.fluid.max_iters));

  o << "\n[transport]\n";
  kv("limiter", enum_name(c.transport.limiter, kLimiters));
  kv("consumption", enum_name(c.transport.consumption, kConsumption));

  const auto& i = c.initial;
  o << "\n[initial]\n";
  kv("n", enum_name(i.n, kDensity));
  kv("n_background", num(i.n_background));
  kv("n_amplitude", num(i.n_amplitude));
  kv("n_width", num(i.n_width));
  kv("n_center", list({i.n_center[0], i.n_center[1], i.n_center[2]}));
  kv("n_value", num(i.n_value));
  kv("c", enum_name(i.c, kSignal));
  kv("c_value", num(i.c_value));
  kv("u", enum_name(i.u, kVelocity));
  kv("u_amplitude", num(i.u_amplitude));
  kv("seed", std::to_string(i.seed));
  if (!i.snapshot.empty()) kv("snapshot", i.snapshot);

  const auto& m = c.monitors;
  o << "\n[monitors]\n";
  kv("kappa", num(m.kappa));
  kv("sigma_n", num(m.sigma_n));
  kv("sigma_c", num(m.sigma_c));
  kv("tol_c_rel", num(m.tol_c_rel));
  kv("tol_energy_rel", num(m.tol_energy_rel));
  kv("ratio_tol", num(m.ratio_tol));
  kv("entropy_p", list(m.entropy_p));
  kv("entropy_delta", num(m.entropy_delta));
  kv("chi1", m.chi1 ? num(*m.chi1) : "auto");
  kv("mass_tol", num(m.mass_tol));
  std::string hard;
  for (const auto& h : m.hard) hard += (hard.empty() ? "" : ", ") + h;
  kv("hard", hard);

  o << "\n[output]\n";
  kv("record_every", std::to_string(c.output.record_every));
  return o.str();
}

// ---- snapshots -----------------------------------------------------------------------------

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    out.insert(out.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    bytes(b, 8);
  }
  void array(std::span<const double> v) {
    for (double x : v) f64(x);
  }
  std::vector<unsigned char> out;
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& b) : buf(b) {}
  const unsigned char* take(std::size_t n) {
    if (buf.size() - pos < n)
      throw FormatError("unexpected EOF at offset " + std::to_string(buf.size()));
    const unsigned char* p = buf.data() + pos;
    pos += n;
    return p;
  }
  std::uint32_t u32() {
    const unsigned char* b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
  }
  double f64() {
    const unsigned char* b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  void array(std::span<double> v) {
    for (double& x : v) x = f64();
  }
  const std::vector<unsigned char>& buf;
  std::size_t pos = 0;
};

}  // namespace

std::vector<unsigned char> encode_snapshot(const State& s) {
  const Grid& g = s.n.grid();
  Writer w;
  w.bytes("CTNS", 4);
  w.u32(kSnapshotVersion);
  w.u32(std::uint32_t(g.dim));
  for (int d = 0; d < 3; ++d) w.u32(std::uint32_t(g.n[d]));
  w.f64(g.h[0]);
  w.f64(g.h[1]);
  w.f64(g.dim == 3 ? g.h[2] : 0.0);
  w.f64(s.t);
  w.array(s.n.values());
  w.array(s.c.values());
  for (int d = 0; d < g.dim; ++d) w.array(s.u.component(d));
  if (s.pressure.size() == g.cell_count())
    w.array(s.pressure.values());
  else
    for (std::size_t i = 0; i < g.cell_count(); ++i) w.f64(0.0);
  return std::move(w.out);
}

State decode_snapshot(const std::vector<unsigned char>& bytes) {
  Reader r(bytes);
  const unsigned char* magic = r.take(4);
  if (std::memcmp(magic, "CTNS", 4) != 0) throw FormatError("bad magic (expected \"CTNS\")");
  const std::uint32_t version = r.u32();
  if (version != kSnapshotVersion)
    throw FormatError("unsupported version " + std::to_string(version));
  const std::uint32_t dim = r.u32();
  std::array<std::uint32_t, 3> n{};
  for (auto& v : n) v = r.u32();
  std::array<double, 3> h{r.f64(), r.f64(), r.f64()};
  const double t = r.f64();
  if (dim != 2 && dim != 3) throw FormatError("invalid dimension " + std::to_string(dim));
  if (dim == 2 && n[2] != 1) throw FormatError("2D snapshot must have nz = 1");
  for (int d = 0; d < int(dim); ++d)
    if (n[d] < 1 || n[d] > (1u << 20) || !(h[d] > 0.0))
      throw FormatError("invalid extent on axis " + std::to_string(d));

  Grid g;
  g.dim = int(dim);
  for (int d = 0; d < 3; ++d) g.n[d] = int(n[d]);
  if (dim == 2) h[2] = 1.0;
  g.h = h;
  for (int d = 0; d < 3; ++d) g.length[d] = g.n[d] * g.h[d];

  State s;
  s.t = t;
  s.n = ScalarField(g);
  s.c = ScalarField(g);
  s.u = VectorField(g);
  s.pressure = ScalarField(g);
  r.array(s.n.values());
  r.array(s.c.values());
  for (int d = 0; d < g.dim; ++d) r.array(s.u.component(d));
  r.array(s.pressure.values());
  if (r.pos != bytes.size())
    throw FormatError("trailing bytes after offset " + std::to_string(r.pos));
  return s;
}

void write_snapshot(const std::filesystem::path& path, const State& state) {
  atomic_write(path, encode_snapshot(state));
}

State read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open snapshot '" + path.string() + "'");
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
  return decode_snapshot(bytes);
}

// ---- CSV -------------------------------------------------------------------------------------

namespace {

using Getter = std::function<double(const MonitorRecord&)>;

const std::vector<std::pair<std::string, Getter>>& columns() {
  static const std::vector<std::pair<std::string, Getter>> cols{
      {"t", [](const MonitorRecord& r) { return r.f.t; }},
      {"mass", [](const MonitorRecord& r) { return r.f.mass; }},
      {"linf_c", [](const MonitorRecord& r) { return r.f.linf_c; }},
      {"l1_c", [](const MonitorRecord& r) { return r.f.l1_c; }},
      {"l2_c", [](const MonitorRecord& r) { return r.f.l2_c; }},
      {"energy_F", [](const MonitorRecord& r) { return r.f.energy_F; }},
      {"dissipation", [](const MonitorRecord& r) { return r.f.dissipation; }},
      {"ns_kinetic", [](const MonitorRecord& r) { return r.f.ns_kinetic; }},
      {"grad_u_sq", [](const MonitorRecord& r) { return r.f.grad_u_sq; }},
      {"forcing_work", [](const MonitorRecord& r) { return r.f.forcing_work; }},
      {"entropy_p2", [](const MonitorRecord& r) { return r.f.entropy_p2; }},
      {"entropy_p3", [](const MonitorRecord& r) { return r.f.entropy_p3; }},
      {"linf_n_dev", [](const MonitorRecord& r) { return r.f.linf_n_dev; }},
      {"linf_u", [](const MonitorRecord& r) { return r.f.linf_u; }},
      {"step", [](const MonitorRecord& r) { return double(r.step); }},
      {"lemma31_p1", [](const MonitorRecord& r) { return r.lemma31_p1; }},
      {"lemma31_p2", [](const MonitorRecord& r) { return r.lemma31_p2; }},
      {"lemma31_trap_p1", [](const MonitorRecord& r) { return r.lemma31_trap_p1; }},
      {"lemma31_trap_p2", [](const MonitorRecord& r) { return r.lemma31_trap_p2; }},
      {"energy1_residual", [](const MonitorRecord& r) { return r.energy1_residual; }},
      {"int_n2", [](const MonitorRecord& r) { return r.int_n2; }},
      {"int_n3", [](const MonitorRecord& r) { return r.int_n3; }},
      {"ndiss_p2", [](const MonitorRecord& r) { return r.ndiss_p2; }},
      {"ndiss_p3", [](const MonitorRecord& r) { return r.ndiss_p3; }},
      {"consumed", [](const MonitorRecord& r) { return r.consumed; }},
      {"grad_c_sq_int", [](const MonitorRecord& r) { return r.grad_c_sq_int; }},
      {"gn_ratio_u", [](const MonitorRecord& r) { return r.gn_ratio_u; }},
      {"max_div_u", [](const MonitorRecord& r) { return r.max_div_u; }},
  };
  return cols;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, get] : columns()) n.push_back(name);
    return n;
  }();
  return names;
}

std::string csv_header() {
  std::string out;
  for (const auto& n : csv_columns()) out += (out.empty() ? "" : ",") + n;
  return out;
}

std::string csv_row(const MonitorRecord& r) {
  std::string out;
  bool first = true;
  for (const auto& [name, get] : columns()) {
    if (!first) out += ',';
    first = false;
    out += num(get(r));
  }
  return out;
}

std::string format_csv(const std::vector<MonitorRecord>& records) {
  std::string out = csv_header() + "\n";
  for (const auto& r : records) out += csv_row(r) + "\n";
  return out;
}

std::vector<std::vector<double>> parse_csv_numbers(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& item : split_list(line)) {
      if (item == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size())
        throw FormatError("bad CSV number '" + item + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- files -------------------------------------------------------------------------------------

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

void atomic_write(const std::filesystem::path& path, const std::vector<unsigned char>& content) {
  atomic_write(path, std::string_view(reinterpret_cast<const char*>(content.data()), content.size()));
}

}  // namespace ctns
