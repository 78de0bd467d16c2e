#include "fracporo/config.hpp"

#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace fracporo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string tok;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!tok.empty()) out.push_back(tok);
      tok.clear();
    } else {
      tok += c;
    }
  }
  if (!tok.empty()) out.push_back(tok);
  return out;
}

class Parser {
 public:
  Parser(std::string source, int line) : source_(std::move(source)), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ":" << line_ << ": " << what;
    throw ConfigError(msg.str());
  }

  double number(const std::string& text) const {
    const std::string t = trim(text);
    if (t.empty()) fail("expected a number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
      fail("invalid number '" + t + "'");
    }
    return v;
  }

  int integer(const std::string& text) const {
    const double v = number(text);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail("expected an integer, got '" + trim(text) + "'");
    return static_cast<int>(v);
  }

  std::vector<double> numbers(const std::string& text, std::size_t count) const {
    std::vector<double> out;
    for (const auto& tok : split_list(text)) out.push_back(number(tok));
    if (count > 0 && out.size() != count) {
      fail("expected " + std::to_string(count) + " numbers, got " + std::to_string(out.size()));
    }
    return out;
  }

  bool boolean(const std::string& text) const {
    const std::string t = trim(text);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    fail("expected true or false, got '" + t + "'");
  }

  std::array<bool, 4> sides(const std::string& text) const {
    std::array<bool, 4> out{false, false, false, false};
    for (const auto& tok : split_list(text)) {
      if (tok == "all") {
        out = {true, true, true, true};
      } else if (tok == "none") {
        out = {false, false, false, false};
      } else if (tok == "left") {
        out[static_cast<int>(Side::kLeft)] = true;
      } else if (tok == "right") {
        out[static_cast<int>(Side::kRight)] = true;
      } else if (tok == "bottom") {
        out[static_cast<int>(Side::kBottom)] = true;
      } else if (tok == "top") {
        out[static_cast<int>(Side::kTop)] = true;
      } else {
        fail("unknown side '" + tok + "' (expected left, right, bottom, top, all or none)");
      }
    }
    return out;
  }

  void set_line(int line) { line_ = line; }

 private:
  std::string source_;
  int line_;
};

using Handler = std::function<void(RunConfig&, const Parser&, const std::string&)>;
using SectionTable = std::map<std::string, Handler>;

template <typename Get>
Handler number_into(Get get) {
  return [get](RunConfig& c, const Parser& p, const std::string& v) { get(c) = p.number(v); };
}

template <typename Get>
Handler integer_into(Get get) {
  return [get](RunConfig& c, const Parser& p, const std::string& v) { get(c) = p.integer(v); };
}

template <typename Get>
Handler vec2_into(Get get) {
  return [get](RunConfig& c, const Parser& p, const std::string& v) {
    const auto xs = p.numbers(v, 2);
    get(c) = Vec2(xs[0], xs[1]);
  };
}

std::map<std::string, SectionTable> schema() {
  std::map<std::string, SectionTable> s;

  auto& g = s["geometry"];
  g["x0"] = number_into([](RunConfig& c) -> double& { return c.geometry.domain.x0; });
  g["y0"] = number_into([](RunConfig& c) -> double& { return c.geometry.domain.y0; });
  g["x1"] = number_into([](RunConfig& c) -> double& { return c.geometry.domain.x1; });
  g["y1"] = number_into([](RunConfig& c) -> double& { return c.geometry.domain.y1; });
  g["h"] = number_into([](RunConfig& c) -> double& { return c.geometry.h; });
  g["refine"] = integer_into([](RunConfig& c) -> int& { return c.geometry.refine; });
  g["fracture"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    const auto xs = p.numbers(v, 0);
    if (xs.size() < 4 || xs.size() % 2 != 0) {
      p.fail("fracture needs an even list of at least 4 coordinates (x y x y ...)");
    }
    c.geometry.fracture.clear();
    for (std::size_t i = 0; i < xs.size(); i += 2) c.geometry.fracture.emplace_back(xs[i], xs[i + 1]);
  };
  g["clamped_sides"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    c.geometry.bc.clamp_displacement = p.sides(v);
  };
  g["pressure_dirichlet_sides"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    c.geometry.bc.fix_pressure = p.sides(v);
  };

  auto& m = s["material"];
  const auto mat = [](double MaterialParams::*field) {
    return number_into([field](RunConfig& c) -> double& { return c.material.*field; });
  };
  m["G"] = mat(&MaterialParams::G);
  m["lambda"] = mat(&MaterialParams::lambda);
  m["alpha"] = mat(&MaterialParams::alpha);
  m["inv_M"] = mat(&MaterialParams::inv_M);
  m["c_f"] = mat(&MaterialParams::c_f);
  m["phi0"] = mat(&MaterialParams::phi0);
  m["mu_f"] = mat(&MaterialParams::mu_f);
  m["rho_fr"] = mat(&MaterialParams::rho_fr);
  m["g"] = mat(&MaterialParams::g);
  m["c_fc"] = mat(&MaterialParams::c_fc);
  m["gamma"] = mat(&MaterialParams::gamma);
  m["c_n"] = mat(&MaterialParams::c_n);
  m["m_n"] = mat(&MaterialParams::m_n);
  m["c_T"] = mat(&MaterialParams::c_T);
  m["m_T"] = mat(&MaterialParams::m_T);
  m["g0"] = mat(&MaterialParams::g0);
  m["normal_jump_sign"] = mat(&MaterialParams::normal_jump_sign);
  m["K"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    const auto xs = p.numbers(v, 0);
    if (xs.size() == 1) {
      c.material.K = xs[0] * Mat2::Identity();
    } else if (xs.size() == 3) {
      c.material.K << xs[0], xs[1], xs[1], xs[2];
    } else {
      p.fail("K takes 1 (isotropic) or 3 (kxx kxy kyy) numbers");
    }
  };
  m["grad_eta"] = vec2_into([](RunConfig& c) -> Vec2& { return c.material.grad_eta; });

  auto& w = s["width"];
  w["profile"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    const std::string t = trim(v);
    if (t == "tip_power") {
      c.width.profile = WidthProfile::Kind::kTipPower;
    } else if (t == "uniform") {
      c.width.profile = WidthProfile::Kind::kUniform;
    } else {
      p.fail("unknown width profile '" + t + "' (expected tip_power or uniform)");
    }
  };
  w["w0"] = number_into([](RunConfig& c) -> double& { return c.width.w0; });
  w["tip_exponent"] = number_into([](RunConfig& c) -> double& { return c.width.tip_exponent; });
  w["growth_rate"] = number_into([](RunConfig& c) -> double& { return c.width.growth_rate; });

  auto& src = s["sources"];
  src["case"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    const std::string t = trim(v);
    if (t == "custom") {
      c.source_case = SourceCase::kCustom;
    } else if (t == "zero") {
      c.source_case = SourceCase::kZero;
    } else if (t == "manufactured") {
      c.source_case = SourceCase::kManufactured;
    } else {
      p.fail("unknown source case '" + t + "' (expected custom, zero or manufactured)");
    }
  };
  const auto load = [](double LoadSpec::*field) {
    return number_into([field](RunConfig& c) -> double& { return c.loads.*field; });
  };
  src["body_force_plus"] = vec2_into([](RunConfig& c) -> Vec2& { return c.loads.body_force_plus; });
  src["body_force_minus"] =
      vec2_into([](RunConfig& c) -> Vec2& { return c.loads.body_force_minus; });
  src["ramp_time"] = load(&LoadSpec::ramp_time);
  src["traveling_amplitude"] = load(&LoadSpec::traveling_amplitude);
  src["traveling_speed"] = load(&LoadSpec::traveling_speed);
  src["traveling_width"] = load(&LoadSpec::traveling_width);
  src["traveling_x0"] = load(&LoadSpec::traveling_x0);
  src["bulk_source"] = load(&LoadSpec::bulk_source);
  src["fracture_injection"] = load(&LoadSpec::fracture_injection);
  src["initial_pressure"] = load(&LoadSpec::initial_pressure);
  src["initial_velocity"] =
      vec2_into([](RunConfig& c) -> Vec2& { return c.loads.initial_velocity; });

  auto& t = s["time"];
  t["dt"] = number_into([](RunConfig& c) -> double& { return c.time.dt; });
  t["steps"] = integer_into([](RunConfig& c) -> int& { return c.steps; });
  t["mode"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    try {
      c.time.mode = parse_mode(trim(v));
    } catch (const ValidationError& e) {
      p.fail(e.what());
    }
  };
  t["fixed_point_tol"] = number_into([](RunConfig& c) -> double& { return c.time.fixed_point_tol; });
  t["max_fixed_point_iters"] =
      integer_into([](RunConfig& c) -> int& { return c.time.max_fixed_point_iters; });
  t["eps_friction"] = number_into([](RunConfig& c) -> double& { return c.time.eps_friction; });

  auto& o = s["output"];
  o["directory"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    c.output.directory = trim(v);
    if (c.output.directory.empty()) p.fail("output directory must not be empty");
  };
  o["fields_every"] = integer_into([](RunConfig& c) -> int& { return c.output.fields_every; });
  o["timeseries"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    c.output.timeseries = p.boolean(v);
  };
  o["energy"] = [](RunConfig& c, const Parser& p, const std::string& v) {
    c.output.energy = p.boolean(v);
  };
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void RunConfig::validate() const {
  try {
    material.validate(time.mode == Mode::kQ);
    time.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  const RectDomain& d = geometry.domain;
  require(d.x1 > d.x0 && d.y1 > d.y0, "domain must satisfy x1 > x0 and y1 > y0");
  require(geometry.h > 0.0, "h must be > 0");
  require(geometry.refine >= 0 && geometry.refine <= 6, "refine must lie in [0, 6]");
  require(geometry.fracture.size() >= 2, "fracture needs at least two points");
  require(width.w0 >= 0.0, "width w0 must be >= 0");
  require(width.tip_exponent > 0.0, "width tip_exponent must be > 0");
  require(steps >= 0, "steps must be >= 0");
  require(output.fields_every >= 0, "fields_every must be >= 0");
  require(loads.ramp_time >= 0.0, "ramp_time must be >= 0");
  require(loads.traveling_width > 0.0, "traveling_width must be > 0");
  bool any_clamped = false;
  for (bool b : geometry.bc.clamp_displacement) any_clamped = any_clamped || b;
  require(any_clamped, "at least one side must be clamped (rigid-body modes would remain)");
  if (source_case == SourceCase::kManufactured) {
    try {
      ManufacturedSolution::check_geometry(geometry.domain, geometry.fracture, geometry.bc);
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
    require(material.alpha == 1.0, "manufactured case requires alpha = 1");
    require(time.mode == Mode::kQ0, "manufactured case runs in mode Q0");
  }
}

RunConfig parse_config(std::istream& in, const std::string& source_name) {
  static const auto table = schema();
  RunConfig cfg;
  Parser parser(source_name, 0);
  const SectionTable* section = nullptr;
  std::string section_name;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    parser.set_line(line_no);
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parser.fail("malformed section header");
      section_name = trim(line.substr(1, line.size() - 2));
      const auto it = table.find(section_name);
      if (it == table.end()) parser.fail("unknown section [" + section_name + "]");
      section = &it->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parser.fail("expected key = value");
    if (section == nullptr) parser.fail("key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = section->find(key);
    if (it == section->end()) parser.fail("unknown key '" + key + "' in [" + section_name + "]");
    if (!seen.insert(section_name + "." + key).second) {
      parser.fail("duplicate key '" + key + "' in [" + section_name + "]");
    }
    it->second(cfg, parser, value);
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

Problem build_problem(const RunConfig& cfg) {
  Problem p;
  p.geometry = build_rect_mesh_with_fracture(cfg.geometry.domain, cfg.geometry.fracture,
                                             cfg.geometry.h);
  for (int i = 0; i < cfg.geometry.refine; ++i) p.geometry = uniform_refine(p.geometry);
  p.dofs = DofMap::build(p.geometry.mesh, cfg.geometry.bc);
  const WidthConfig& w = cfg.width;
  p.width = w.profile == WidthProfile::Kind::kUniform
                ? WidthProfile::uniform(w.w0, w.growth_rate)
                : WidthProfile::tip_power(w.w0, w.tip_exponent, p.geometry.fracture.length,
                                          w.growth_rate);
  switch (cfg.source_case) {
    case SourceCase::kZero:
      break;
    case SourceCase::kCustom:
      p.sources = make_sources(cfg.loads);
      break;
    case SourceCase::kManufactured: {
      auto solution = std::make_shared<const ManufacturedSolution>(
          cfg.material, p.width, p.geometry.fracture.tips[0].x());
      const SourceData inner = solution->sources();
      // Keep the solution alive for as long as any copy of the sources exists.
      p.sources.body_force = [solution, f = inner.body_force](const Point2& x, double t,
                                                              Subdomain s) { return f(x, t, s); };
      p.sources.bulk_source = [solution, f = inner.bulk_source](const Point2& x, double t) {
        return f(x, t);
      };
      p.sources.fracture_injection = [solution, f = inner.fracture_injection](double s, double t) {
        return f(s, t);
      };
      p.sources.initial_pressure = [solution, f = inner.initial_pressure](const Point2& x) {
        return f(x);
      };
      p.sources.initial_velocity = [solution, f = inner.initial_velocity](const Point2& x) {
        return f(x);
      };
      p.manufactured = solution;
      break;
    }
  }
  return p;
}

}  // namespace fracporo
