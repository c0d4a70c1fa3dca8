#include "decaf/config.hpp"

#include <fstream>
#include <set>

#include "decaf/errors.hpp"

namespace decaf {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + " must be a JSON object");
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  expect_object(obj, path);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    if (!ok.count(item.key()))
      throw ConfigError("unknown key " + path + "." + item.key());
}

template <typename T>
T field(const json& obj, const std::string& path, const char* key, T def) {
  if (!obj.contains(key)) return def;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key + ": " + e.what());
  }
}

std::string str_field(const json& obj, const std::string& path, const char* key,
                      const std::string& def) {
  return field<std::string>(obj, path, key, def);
}

Eigen::Vector3d vec3_field(const json& obj, const std::string& path, const char* key,
                           const Eigen::Vector3d& def) {
  if (!obj.contains(key)) return def;
  const auto v = field<std::vector<double>>(obj, path, key, {});
  if (v.size() != 3) throw ConfigError(path + "." + key + " must have 3 entries");
  return {v[0], v[1], v[2]};
}

void parse_grid(const json& j, const std::string& path, Grid3D& g) {
  check_keys(j, path, {"nx", "ny", "nz", "dx", "dy", "dz", "z0"});
  g.nx = field(j, path, "nx", g.nx);
  g.ny = field(j, path, "ny", g.ny);
  g.nz = field(j, path, "nz", g.nz);
  g.dx = field(j, path, "dx", g.dx);
  g.dy = field(j, path, "dy", g.dy);
  g.dz = field(j, path, "dz", g.dz);
  g.z0 = field(j, path, "z0", g.z0);
  g.validate();
}

void parse_cells(const json& j, const std::string& path, const RunConfig& cfg,
                 std::vector<Ellipsoid>& cells) {
  if (!j.is_array()) throw ConfigError(path + " must be an array");
  cells.clear();
  int idx = 0;
  for (const auto& cj : j) {
    const std::string cpath = path + "[" + std::to_string(idx++) + "]";
    check_keys(cj, cpath, {"center", "semi", "amp_re", "amp_im", "softness"});
    Ellipsoid c;
    c.center = vec3_field(cj, cpath, "center", Eigen::Vector3d::Zero());
    c.semi = vec3_field(cj, cpath, "semi", Eigen::Vector3d::Ones());
    c.amp_re = field(cj, cpath, "amp_re", cfg.phantom_amp_re);
    c.amp_im = field(cj, cpath, "amp_im", cfg.phantom_amp_im);
    c.softness = field(cj, cpath, "softness", cfg.phantom_softness);
    cells.push_back(c);
  }
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  RunConfig cfg;
  check_keys(doc, "$",
             {"grid", "setup", "phantom", "noise", "encoding", "mlp", "loss",
              "partition", "schedule", "denoiser", "tikhonov", "variant", "paths"});

  if (doc.contains("grid")) parse_grid(doc.at("grid"), "$.grid", cfg.grid);

  if (doc.contains("setup")) {
    const json& j = doc.at("setup");
    const std::string path = "$.setup";
    check_keys(j, path,
               {"preset", "lambda", "na", "n0", "geometry", "sources", "groups",
                "absorption_sign"});
    cfg.setup_preset = str_field(j, path, "preset", cfg.setup_preset);
    cfg.lambda = field(j, path, "lambda", cfg.lambda);
    cfg.na = field(j, path, "na", cfg.na);
    cfg.n0 = field(j, path, "n0", cfg.n0);
    if (j.contains("geometry")) {
      const json& gj = j.at("geometry");
      const std::string gpath = path + ".geometry";
      check_keys(gj, gpath,
                 {"led_pitch_mm", "led_distance_mm", "incidence_deg", "azimuths",
                  "ring_count", "ring_na_min", "ring_na_max", "groups"});
      SetupGeometry& geo = cfg.geometry;
      geo.led_pitch_mm = field(gj, gpath, "led_pitch_mm", geo.led_pitch_mm);
      geo.led_distance_mm = field(gj, gpath, "led_distance_mm", geo.led_distance_mm);
      geo.incidence_deg = field(gj, gpath, "incidence_deg", geo.incidence_deg);
      geo.azimuths = field(gj, gpath, "azimuths", geo.azimuths);
      geo.ring_count = field(gj, gpath, "ring_count", geo.ring_count);
      geo.ring_na_min = field(gj, gpath, "ring_na_min", geo.ring_na_min);
      geo.ring_na_max = field(gj, gpath, "ring_na_max", geo.ring_na_max);
      geo.groups = field(gj, gpath, "groups", geo.groups);
    }
    if (j.contains("sources")) {
      const auto rows = field<std::vector<std::vector<double>>>(j, path, "sources", {});
      cfg.sources.clear();
      for (const auto& r : rows) {
        if (r.size() != 2) throw ConfigError(path + ".sources entries must be [ux, uy]");
        cfg.sources.push_back({Eigen::Vector2d(r[0], r[1])});
      }
    }
    if (j.contains("groups"))
      cfg.source_groups = field<std::vector<std::vector<int>>>(j, path, "groups", {});
    const std::string sign = str_field(j, path, "absorption_sign", "difference");
    if (sign == "difference") cfg.sign = AbsorptionSign::Difference;
    else if (sign == "sum") cfg.sign = AbsorptionSign::Sum;
    else throw ConfigError(path + ".absorption_sign must be difference or sum");
    if (cfg.setup_preset != "custom") setup_preset_from(cfg.setup_preset);
  }

  if (doc.contains("phantom")) {
    const json& j = doc.at("phantom");
    const std::string path = "$.phantom";
    check_keys(j, path, {"seed", "count", "amp_re", "amp_im", "softness", "cells"});
    cfg.phantom_seed = field(j, path, "seed", cfg.phantom_seed);
    cfg.phantom_count = field(j, path, "count", cfg.phantom_count);
    cfg.phantom_amp_re = field(j, path, "amp_re", cfg.phantom_amp_re);
    cfg.phantom_amp_im = field(j, path, "amp_im", cfg.phantom_amp_im);
    cfg.phantom_softness = field(j, path, "softness", cfg.phantom_softness);
    if (j.contains("cells")) parse_cells(j.at("cells"), path + ".cells", cfg, cfg.cells);
  }

  if (doc.contains("noise")) {
    const json& j = doc.at("noise");
    const std::string path = "$.noise";
    check_keys(j, path, {"kind", "std", "seed"});
    const std::string kind = str_field(j, path, "kind", "none");
    if (kind == "none") cfg.noise.kind = NoiseSpec::Kind::None;
    else if (kind == "gaussian") cfg.noise.kind = NoiseSpec::Kind::Gaussian;
    else throw ConfigError(path + ".kind must be none or gaussian");
    cfg.noise.std = field(j, path, "std", cfg.noise.std);
    cfg.noise.seed = field(j, path, "seed", cfg.noise.seed);
    cfg.noise.validate();
  }

  if (doc.contains("encoding")) {
    const json& j = doc.at("encoding");
    const std::string path = "$.encoding";
    check_keys(j, path,
               {"kind", "l_xy", "l_z", "k", "thetas", "gaussian_rows",
                "gaussian_scale", "seed"});
    cfg.encoding.kind = encoding_kind_from(str_field(j, path, "kind", "radial"));
    cfg.encoding.l_xy = field(j, path, "l_xy", cfg.encoding.l_xy);
    cfg.encoding.l_z = field(j, path, "l_z", cfg.encoding.l_z);
    cfg.encoding.gaussian_rows = field(j, path, "gaussian_rows", cfg.encoding.gaussian_rows);
    cfg.encoding.gaussian_scale = field(j, path, "gaussian_scale", cfg.encoding.gaussian_scale);
    cfg.encoding.seed = field(j, path, "seed", cfg.encoding.seed);
    if (j.contains("thetas")) {
      cfg.encoding.thetas = field<std::vector<double>>(j, path, "thetas", {});
      if (j.contains("k") &&
          field<int>(j, path, "k", 0) != static_cast<int>(cfg.encoding.thetas.size()))
        throw ConfigError(path + ": k disagrees with the thetas list");
    } else {
      // k rotations evenly spread over a quarter turn, starting at 0.
      const int k = field(j, path, "k", 2);
      if (k < 1) throw ConfigError(path + ".k must be positive");
      cfg.encoding.thetas.clear();
      for (int t = 0; t < k; ++t)
        cfg.encoding.thetas.push_back(EIGEN_PI / 2.0 * t / k);
    }
  } else {
    cfg.encoding.thetas = {0.0, EIGEN_PI / 4.0};
  }

  if (doc.contains("mlp")) {
    const json& j = doc.at("mlp");
    const std::string path = "$.mlp";
    check_keys(j, path, {"layers", "width", "seed"});
    cfg.mlp.layers = field(j, path, "layers", cfg.mlp.layers);
    cfg.mlp.width = field(j, path, "width", cfg.mlp.width);
    cfg.mlp.seed = field(j, path, "seed", cfg.mlp.seed);
  }

  if (doc.contains("loss")) {
    const json& j = doc.at("loss");
    const std::string path = "$.loss";
    check_keys(j, path, {"alpha", "beta", "charbonnier_eps"});
    cfg.train.weights.alpha = field(j, path, "alpha", cfg.train.weights.alpha);
    cfg.train.weights.beta = field(j, path, "beta", cfg.train.weights.beta);
    cfg.train.weights.charbonnier_eps =
        field(j, path, "charbonnier_eps", cfg.train.weights.charbonnier_eps);
    cfg.train.weights.validate();
  }

  if (doc.contains("partition")) {
    const json& j = doc.at("partition");
    const std::string path = "$.partition";
    check_keys(j, path, {"blocks", "padding", "margin"});
    cfg.train.blocks = field(j, path, "blocks", cfg.train.blocks);
    cfg.train.padding = field(j, path, "padding", cfg.train.padding);
    if (j.contains("margin")) {
      if (j.at("margin").is_string()) {
        if (j.at("margin").get<std::string>() != "full")
          throw ConfigError(path + ".margin must be an integer or \"full\"");
        cfg.train.full_view = true;
      } else {
        cfg.train.margin = field(j, path, "margin", cfg.train.margin);
      }
    }
  }

  if (doc.contains("schedule")) {
    const json& j = doc.at("schedule");
    const std::string path = "$.schedule";
    check_keys(j, path, {"iters", "log_every", "lr0", "decay", "period", "seed"});
    cfg.train.iters = field(j, path, "iters", cfg.train.iters);
    cfg.train.log_every = field(j, path, "log_every", cfg.train.log_every);
    cfg.train.adam.lr0 = field(j, path, "lr0", cfg.train.adam.lr0);
    cfg.train.adam.decay = field(j, path, "decay", cfg.train.adam.decay);
    cfg.train.adam.period = field(j, path, "period", cfg.train.adam.period);
    cfg.train.seed = field(j, path, "seed", cfg.train.seed);
  }

  if (doc.contains("denoiser")) {
    const json& j = doc.at("denoiser");
    const std::string path = "$.denoiser";
    check_keys(j, path, {"kind", "sigma", "weights"});
    cfg.denoiser_kind = denoiser_kind_from(str_field(j, path, "kind", "identity"));
    cfg.denoiser_sigma = field(j, path, "sigma", cfg.denoiser_sigma);
    cfg.denoiser_weights = str_field(j, path, "weights", cfg.denoiser_weights);
  }

  if (doc.contains("tikhonov")) {
    const json& j = doc.at("tikhonov");
    const std::string path = "$.tikhonov";
    check_keys(j, path, {"tau", "solver", "cg_tol", "cg_maxiter"});
    cfg.tikhonov.tau = field(j, path, "tau", cfg.tikhonov.tau);
    cfg.tikhonov.solver = tikhonov_solver_from(str_field(j, path, "solver", "direct"));
    cfg.tikhonov.cg_tol = field(j, path, "cg_tol", cfg.tikhonov.cg_tol);
    cfg.tikhonov.cg_maxiter = field(j, path, "cg_maxiter", cfg.tikhonov.cg_maxiter);
    cfg.tikhonov.validate();
  }

  if (doc.contains("variant"))
    cfg.train.variant = variant_from(field<std::string>(doc, "$", "variant", "full"));

  if (doc.contains("paths")) {
    const json& j = doc.at("paths");
    const std::string path = "$.paths";
    check_keys(j, path, {"out_dir", "measurements", "phantom"});
    cfg.out_dir = str_field(j, path, "out_dir", cfg.out_dir);
    cfg.measurements_path = str_field(j, path, "measurements", cfg.measurements_path);
    cfg.phantom_path = str_field(j, path, "phantom", cfg.phantom_path);
  }

  cfg.train.sign = cfg.sign;
  cfg.encoding.validate();
  cfg.mlp.validate();
  return cfg;
}

void parse_phantom_doc(const json& doc, RunConfig& cfg) {
  check_keys(doc, "$", {"grid", "seed", "count", "amp_re", "amp_im", "softness", "cells"});
  if (doc.contains("grid")) parse_grid(doc.at("grid"), "$.grid", cfg.grid);
  cfg.phantom_seed = field(doc, "$", "seed", cfg.phantom_seed);
  cfg.phantom_count = field(doc, "$", "count", cfg.phantom_count);
  cfg.phantom_amp_re = field(doc, "$", "amp_re", cfg.phantom_amp_re);
  cfg.phantom_amp_im = field(doc, "$", "amp_im", cfg.phantom_amp_im);
  cfg.phantom_softness = field(doc, "$", "softness", cfg.phantom_softness);
  if (doc.contains("cells")) parse_cells(doc.at("cells"), "$.cells", cfg, cfg.cells);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + " is not valid JSON: " + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(load_json_file(path));
}

OpticalSetup RunConfig::make_optical_setup() const {
  if (setup_preset == "custom") {
    OpticalSetup s;
    s.lambda = lambda;
    s.na = na;
    s.n0 = n0;
    s.sources = sources;
    s.groups = source_groups;
    s.validate();
    return s;
  }
  return make_setup(setup_preset_from(setup_preset), lambda, na, n0, geometry);
}

PhantomSpec RunConfig::make_phantom_spec() const {
  PhantomSpec spec;
  spec.grid = grid;
  spec.cells = cells.empty()
                   ? random_cells(grid, phantom_count, phantom_seed, phantom_amp_re,
                                  phantom_amp_im, phantom_softness)
                   : cells;
  return spec;
}

Denoiser RunConfig::make_denoiser() const {
  switch (denoiser_kind) {
    case DenoiserKind::Identity: return Denoiser::identity();
    case DenoiserKind::GaussianResidual: return Denoiser::gaussian_residual(denoiser_sigma);
    case DenoiserKind::Cnn:
      if (denoiser_weights.empty())
        throw ConfigError("cnn denoiser needs a weights path");
      return Denoiser::cnn(read_dcdn(denoiser_weights));
  }
  throw ConfigError("unreachable denoiser kind");
}

json RunConfig::resolved() const {
  json j;
  j["grid"] = {{"nx", grid.nx}, {"ny", grid.ny}, {"nz", grid.nz}, {"dx", grid.dx},
               {"dy", grid.dy}, {"dz", grid.dz}, {"z0", grid.z0}};
  json setup{{"preset", setup_preset}, {"lambda", lambda}, {"na", na}, {"n0", n0},
             {"absorption_sign", sign == AbsorptionSign::Difference ? "difference" : "sum"}};
  setup["geometry"] = {{"led_pitch_mm", geometry.led_pitch_mm},
                       {"led_distance_mm", geometry.led_distance_mm},
                       {"incidence_deg", geometry.incidence_deg},
                       {"azimuths", geometry.azimuths},
                       {"ring_count", geometry.ring_count},
                       {"ring_na_min", geometry.ring_na_min},
                       {"ring_na_max", geometry.ring_na_max},
                       {"groups", geometry.groups}};
  if (!sources.empty()) {
    json rows = json::array();
    for (const auto& s : sources) rows.push_back({s.u.x(), s.u.y()});
    setup["sources"] = rows;
  }
  if (!source_groups.empty()) setup["groups"] = source_groups;
  j["setup"] = std::move(setup);
  json phantom{{"seed", phantom_seed},     {"count", phantom_count},
               {"amp_re", phantom_amp_re}, {"amp_im", phantom_amp_im},
               {"softness", phantom_softness}};
  if (!cells.empty()) {
    json arr = json::array();
    for (const auto& c : cells)
      arr.push_back({{"center", {c.center.x(), c.center.y(), c.center.z()}},
                     {"semi", {c.semi.x(), c.semi.y(), c.semi.z()}},
                     {"amp_re", c.amp_re},
                     {"amp_im", c.amp_im},
                     {"softness", c.softness}});
    phantom["cells"] = std::move(arr);
  }
  j["phantom"] = std::move(phantom);
  j["noise"] = {{"kind", noise.kind == NoiseSpec::Kind::None ? "none" : "gaussian"},
                {"std", noise.std},
                {"seed", noise.seed}};
  j["encoding"] = {{"kind", to_string(encoding.kind)},
                   {"l_xy", encoding.l_xy},
                   {"l_z", encoding.l_z},
                   {"thetas", encoding.thetas},
                   {"gaussian_rows", encoding.gaussian_rows},
                   {"gaussian_scale", encoding.gaussian_scale},
                   {"seed", encoding.seed}};
  j["mlp"] = {{"layers", mlp.layers}, {"width", mlp.width}, {"seed", mlp.seed}};
  j["loss"] = {{"alpha", train.weights.alpha},
               {"beta", train.weights.beta},
               {"charbonnier_eps", train.weights.charbonnier_eps}};
  json part{{"blocks", train.blocks}, {"padding", train.padding}};
  if (train.full_view) part["margin"] = "full";
  else part["margin"] = train.margin;
  j["partition"] = std::move(part);
  j["schedule"] = {{"iters", train.iters},   {"log_every", train.log_every},
                   {"lr0", train.adam.lr0},  {"decay", train.adam.decay},
                   {"period", train.adam.period}, {"seed", train.seed}};
  json den{{"kind", to_string(denoiser_kind)}, {"sigma", denoiser_sigma}};
  if (!denoiser_weights.empty()) den["weights"] = denoiser_weights;
  j["denoiser"] = std::move(den);
  j["tikhonov"] = {{"tau", tikhonov.tau},
                   {"solver", to_string(tikhonov.solver)},
                   {"cg_tol", tikhonov.cg_tol},
                   {"cg_maxiter", tikhonov.cg_maxiter}};
  j["variant"] = to_string(train.variant);
  json paths{{"out_dir", out_dir}};
  if (!measurements_path.empty()) paths["measurements"] = measurements_path;
  if (!phantom_path.empty()) paths["phantom"] = phantom_path;
  j["paths"] = std::move(paths);
  return j;
}

}  // namespace decaf
