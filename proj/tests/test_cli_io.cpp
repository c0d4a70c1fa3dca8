#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "decaf/volume_io.hpp"

using namespace decaf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path decaf_binary() {
  return fs::read_symlink("/proc/self/exe").parent_path() / "decaf";
}

fs::path work_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() /
                 ("decaf_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return root;
}

struct RunResult {
  int code = -1;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args, const std::string& env = "") {
  static int serial = 0;
  const fs::path log = work_root() / ("run_" + std::to_string(serial++) + ".log");
  const std::string cmd = env + (env.empty() ? "" : " ") +
                          decaf_binary().string() + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(read_bytes(p)); }

// Complete run configuration, small enough for sub-second commands.
json base_config(const std::string& out_dir) {
  return json{
      {"grid", {{"nx", 16}, {"ny", 16}, {"nz", 2}, {"dx", 0.1625},
                {"dy", 0.1625}, {"dz", 0.5}, {"z0", -0.5}}},
      {"setup",
       {{"preset", "annular24"},
        {"lambda", 0.515},
        {"na", 0.65},
        {"n0", 1.0},
        {"absorption_sign", "difference"},
        {"geometry",
         {{"azimuths", 4}, {"incidence_deg", 40.0}, {"led_pitch_mm", 4.0},
          {"led_distance_mm", 79.0}, {"ring_count", 4}, {"ring_na_min", 0.3},
          {"ring_na_max", 0.575}, {"groups", 16}}}}},
      {"phantom", {{"seed", 3}, {"count", 2}, {"amp_re", 0.12},
                   {"amp_im", 0.01}, {"softness", 0.25}}},
      {"noise", {{"kind", "none"}, {"std", 0.0}, {"seed", 0}}},
      {"encoding", {{"kind", "radial"}, {"l_xy", 2}, {"l_z", 2},
                    {"thetas", {0.0}}, {"gaussian_rows", 32},
                    {"gaussian_scale", 1.0}, {"seed", 1}}},
      {"mlp", {{"layers", 4}, {"width", 16}, {"seed", 7}}},
      {"loss", {{"alpha", 0.05}, {"beta", 0.1}, {"charbonnier_eps", 0.05}}},
      {"partition", {{"blocks", 1}, {"padding", 2}, {"margin", 2}}},
      {"schedule", {{"iters", 6}, {"log_every", 2}, {"lr0", 0.001},
                    {"decay", 0.01}, {"period", 100}, {"seed", 1}}},
      {"denoiser", {{"kind", "gaussian-residual"}, {"sigma", 0.02}}},
      {"tikhonov", {{"tau", 0.001}, {"solver", "direct"}, {"cg_tol", 1e-10},
                    {"cg_maxiter", 500}}},
      {"variant", "full"},
      {"paths", {{"out_dir", out_dir}}}};
}

fs::path write_config(const std::string& name, const json& doc) {
  const fs::path p = work_root() / name;
  std::ofstream out(p);
  out << doc.dump(1);
  return p;
}

// Simulated inputs shared by the reconstruction-oriented cases.
const fs::path& sim_dir() {
  static const fs::path dir = [] {
    const fs::path d = work_root() / "sim";
    const fs::path cfg = write_config("sim.json", base_config(d.string()));
    const RunResult r = run("simulate --config " + cfg.string());
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

json recon_config(const std::string& out_dir) {
  json cfg = base_config(out_dir);
  cfg["paths"]["measurements"] = (sim_dir() / "measurements.dcam").string();
  cfg["paths"]["phantom"] = (sim_dir() / "phantom.dcaf").string();
  return cfg;
}

}  // namespace

TEST_CASE("argument and configuration failures use exit code 2") {
  CHECK(run("").code == 2);                       // a subcommand is required
  CHECK(run("--bogus").code == 2);                // unknown flag
  CHECK(run("reconstruct").code == 2);            // missing required --config
  CHECK(run("frobnicate").code == 2);             // unknown subcommand
  CHECK(run("--help").code == 0);
  CHECK(run("simulate --help").code == 0);

  // Malformed JSON document.
  const fs::path bad = work_root() / "bad.json";
  std::ofstream(bad) << "{ this is not json";
  const RunResult r1 = run("reconstruct --config " + bad.string());
  CHECK(r1.code == 2);
  CHECK(r1.output.find("error (config):") != std::string::npos);

  // Unknown keys are rejected with their full path.
  json cfg = base_config((work_root() / "nowhere").string());
  cfg["grid"]["bogus"] = 1;
  const fs::path unk = write_config("unknown_key.json", cfg);
  const RunResult r2 = run("simulate --config " + unk.string());
  CHECK(r2.code == 2);
  CHECK(r2.output.find("unknown key $.grid.bogus") != std::string::npos);

  json cfg2 = base_config((work_root() / "nowhere").string());
  cfg2["extra_section"] = json::object();
  const fs::path unk2 = write_config("unknown_root.json", cfg2);
  const RunResult r3 = run("simulate --config " + unk2.string());
  CHECK(r3.code == 2);
  CHECK(r3.output.find("unknown key $.extra_section") != std::string::npos);
}

TEST_CASE("missing input files use exit code 3") {
  const RunResult r = run("reconstruct --config /nonexistent/cfg.json");
  CHECK(r.code == 3);
  CHECK(r.output.find("error (io):") != std::string::npos);

  const RunResult r2 =
      run("evaluate --ref /nonexistent/a.dcaf --est /nonexistent/b.dcaf");
  CHECK(r2.code == 3);
}

TEST_CASE("simulate: deterministic outputs and reusable resolved config") {
  const fs::path d1 = sim_dir();
  CHECK(fs::exists(d1 / "phantom.dcaf"));
  CHECK(fs::exists(d1 / "measurements.dcam"));
  CHECK(fs::exists(d1 / "resolved.json"));

  // A second run from the same document is byte-identical.
  const fs::path d2 = work_root() / "sim2";
  json cfg = base_config(d2.string());
  const fs::path p2 = write_config("sim2.json", cfg);
  REQUIRE(run("simulate --config " + p2.string()).code == 0);
  CHECK(read_bytes(d1 / "phantom.dcaf") == read_bytes(d2 / "phantom.dcaf"));
  CHECK(read_bytes(d1 / "measurements.dcam") == read_bytes(d2 / "measurements.dcam"));

  // The emitted resolved.json is itself a valid run configuration that
  // reproduces the same data.
  const fs::path d3 = work_root() / "sim3";
  REQUIRE(run("simulate --config " + (d1 / "resolved.json").string() +
              " --out " + d3.string())
              .code == 0);
  CHECK(read_bytes(d1 / "phantom.dcaf") == read_bytes(d3 / "phantom.dcaf"));
  CHECK(read_bytes(d1 / "measurements.dcam") == read_bytes(d3 / "measurements.dcam"));

  // The seed override changes the phantom.
  const fs::path d4 = work_root() / "sim4";
  REQUIRE(run("simulate --config " + p2.string() + " --seed 99 --out " +
              d4.string())
              .code == 0);
  CHECK(read_bytes(d1 / "phantom.dcaf") != read_bytes(d4 / "phantom.dcaf"));
}

TEST_CASE("reconstruct writes the full artifact set; render reproduces it") {
  const fs::path out = work_root() / "rec";
  const fs::path cfg = write_config("rec.json", recon_config(out.string()));
  const RunResult r = run("reconstruct --config " + cfg.string());
  REQUIRE(r.code == 0);
  CHECK(r.output.find("trained 6 iterations") != std::string::npos);
  for (const char* name :
       {"weights.dcfw", "volume.dcaf", "log.csv", "resolved.json", "summary.json"})
    CHECK(fs::exists(out / name));

  // Log: pinned header, one record per logging interval plus record 0.
  std::ifstream log(out / "log.csv");
  std::string header;
  std::getline(log, header);
  CHECK(header == "iter,term1,term2,term3,total,mae,lr");
  int rows = 0;
  for (std::string line; std::getline(log, line);) ++rows;
  CHECK(rows == 4);  // iters 0, 2, 4, 6

  const json summary = read_json(out / "summary.json");
  CHECK(summary["iterations"] == 6);
  CHECK(summary["variant"] == "full");
  CHECK(summary["final"]["iter"] == 6);
  CHECK(summary.contains("vs_reference"));  // phantom path was configured

  // Rendering the saved weights at the training density reproduces the
  // emitted volume bit for bit.
  const fs::path again = work_root() / "render_again.dcaf";
  REQUIRE(run("render --weights " + (out / "weights.dcfw").string() +
              " --config " + cfg.string() + " --upsample 1x1x1 --out " +
              again.string())
              .code == 0);
  CHECK(read_bytes(out / "volume.dcaf") == read_bytes(again));

  // Densified render: the grid grows as (n-1)*f + 1 per axis.
  const fs::path dense = work_root() / "render_dense.dcaf";
  REQUIRE(run("render --weights " + (out / "weights.dcfw").string() +
              " --config " + cfg.string() + " --upsample 2x1x3 --out " +
              dense.string())
              .code == 0);
  const json side = read_json(dense.string() + ".resolved.json");
  CHECK(side["grid"]["nx"] == 31);
  CHECK(side["grid"]["ny"] == 16);
  CHECK(side["grid"]["nz"] == 4);
  CHECK(side["extrapolated_points"] == 0);
  const PermittivityVolume dv = read_dcaf(dense.string());
  CHECK(dv.grid.nx == 31);
  CHECK(dv.grid.nz == 4);

  // Nonsense upsample specs are configuration errors.
  CHECK(run("render --weights " + (out / "weights.dcfw").string() +
            " --config " + cfg.string() + " --upsample 2x2 --out " +
            (work_root() / "x.dcaf").string())
            .code == 2);
}

TEST_CASE("reconstruction is reproducible and thread-count independent") {
  const fs::path a = work_root() / "rep_a";
  const fs::path b = work_root() / "rep_b";
  const fs::path ca = write_config("rep_a.json", recon_config(a.string()));
  const fs::path cb = write_config("rep_b.json", recon_config(b.string()));
  REQUIRE(run("reconstruct --config " + ca.string()).code == 0);
  REQUIRE(run("reconstruct --config " + cb.string(), "DECAF_THREADS=1").code == 0);
  CHECK(read_bytes(a / "volume.dcaf") == read_bytes(b / "volume.dcaf"));
  CHECK(read_bytes(a / "weights.dcfw") == read_bytes(b / "weights.dcfw"));
  CHECK(read_bytes(a / "log.csv") == read_bytes(b / "log.csv"));
}

TEST_CASE("divergent training exits with the numeric-failure code") {
  const fs::path out = work_root() / "diverge";
  json cfg = recon_config(out.string());
  cfg["schedule"]["lr0"] = 1e150;
  cfg["schedule"]["iters"] = 4;
  const fs::path p = write_config("diverge.json", cfg);
  const RunResult r = run("reconstruct --config " + p.string());
  CHECK(r.code == 4);
  CHECK(r.output.find("error (numeric):") != std::string::npos);
}

TEST_CASE("variant and iteration overrides land in the artifacts") {
  const fs::path out = work_root() / "variant";
  const fs::path cfg = write_config("variant.json", recon_config(out.string()));
  REQUIRE(run("reconstruct --config " + cfg.string() +
              " --iters 2 --variant Noreg")
              .code == 0);
  const json summary = read_json(out / "summary.json");
  CHECK(summary["iterations"] == 2);
  CHECK(summary["variant"] == "Noreg");
  const json resolved = read_json(out / "resolved.json");
  CHECK(resolved["variant"] == "Noreg");
  CHECK(resolved["schedule"]["iters"] == 2);
}

TEST_CASE("tikhonov baseline: output, sidecar, tau validation") {
  const fs::path out = work_root() / "tik.dcaf";
  const fs::path cfg = write_config("tik.json", recon_config("unused"));
  REQUIRE(run("tikhonov --config " + cfg.string() + " --tau 1e-3 --out " +
              out.string())
              .code == 0);
  CHECK(fs::exists(out));
  const json side = read_json(out.string() + ".resolved.json");
  CHECK(side["tikhonov"]["tau"] == 1e-3);
  const PermittivityVolume v = read_dcaf(out.string());
  CHECK(v.grid.nx == 16);
  CHECK(v.complex_pair());

  CHECK(run("tikhonov --config " + cfg.string() + " --tau -1 --out " +
            (work_root() / "bad_tau.dcaf").string())
            .code == 2);
}

TEST_CASE("evaluate: metrics json, identical-input handling, peak override") {
  const fs::path d = sim_dir();
  const fs::path self_json = work_root() / "eval_self.json";
  const RunResult same =
      run("evaluate --ref " + (d / "phantom.dcaf").string() + " --est " +
          (d / "phantom.dcaf").string() + " --out " + self_json.string());
  REQUIRE(same.code == 0);
  CHECK(same.output.find("identical inputs (mse = 0); psnr is undefined") !=
        std::string::npos);
  const json self = read_json(self_json);
  CHECK(self["identical"] == true);
  CHECK(self["mse"] == 0.0);
  CHECK(self["psnr_db"].is_null());

  // Against the tikhonov estimate: finite metrics obeying the psnr formula.
  const fs::path est = work_root() / "tik.dcaf";
  const fs::path ej = work_root() / "eval_tik.json";
  REQUIRE(run("evaluate --ref " + (d / "phantom.dcaf").string() + " --est " +
              est.string() + " --out " + ej.string())
              .code == 0);
  const json m = read_json(ej);
  CHECK(m["mse"].get<double>() > 0);
  const double expect =
      10.0 * std::log10(m["peak"].get<double>() * m["peak"].get<double>() /
                        m["mse"].get<double>());
  CHECK(std::abs(m["psnr_db"].get<double>() - expect) < 1e-9);

  const fs::path pj = work_root() / "eval_peak.json";
  REQUIRE(run("evaluate --ref " + (d / "phantom.dcaf").string() + " --est " +
              est.string() + " --peak 2.0 --out " + pj.string())
              .code == 0);
  CHECK(read_json(pj)["peak"] == 2.0);
}

TEST_CASE("export-slice: csv round trip, png sidecar, line profile") {
  const fs::path d = sim_dir();
  const PermittivityVolume vol = read_dcaf((d / "phantom.dcaf").string());

  // CSV: one line per y row, values round-trip the stored binary32 exactly.
  const fs::path csv = work_root() / "slice.csv";
  REQUIRE(run("export-slice --volume " + (d / "phantom.dcaf").string() +
              " --axis z --index 1 --format csv --out " + csv.string())
              .code == 0);
  std::ifstream in(csv);
  std::vector<std::vector<double>> lines;
  for (std::string line; std::getline(in, line);) {
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
      row.push_back(std::stod(cell));
    lines.push_back(row);
  }
  REQUIRE(lines.size() == 16);  // ny lines
  REQUIRE(lines[0].size() == 16);
  // The cells carry enough digits to recover the stored binary32 exactly.
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i)
      CHECK(static_cast<float>(lines[j][i]) ==
            static_cast<float>(vol.re[1](i, j)));

  // PNG plus a sidecar holding the exact value range.
  const fs::path png = work_root() / "slice.png";
  REQUIRE(run("export-slice --volume " + (d / "phantom.dcaf").string() +
              " --axis z --index 1 --channel im --out " + png.string())
              .code == 0);
  const std::string magic = read_bytes(png).substr(0, 4);
  CHECK(magic == std::string("\x89PNG", 4));
  const json side = read_json(png.string() + ".json");
  CHECK(side["min"] == vol.im[1].minCoeff());
  CHECK(side["max"] == vol.im[1].maxCoeff());
  CHECK(side["width"] == 16);
  CHECK(side["height"] == 16);

  // Line profile: step/x/y/value rows between the requested endpoints.
  const fs::path prof = work_root() / "profile.csv";
  REQUIRE(run("export-slice --volume " + (d / "phantom.dcaf").string() +
              " --axis z --index 0 --profile 0,3,15,3 --out " + prof.string())
              .code == 0);
  std::ifstream pin(prof);
  std::string header;
  std::getline(pin, header);
  CHECK(header == "step,x,y,value");
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(pin, line);) {
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
      row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  REQUIRE(rows.size() == 16);
  CHECK(rows.front()[1] == 0);
  CHECK(rows.front()[2] == 3);
  CHECK(rows.front()[3] == vol.re[0](0, 3));
  CHECK(rows.back()[1] == 15);
  CHECK(rows.back()[3] == vol.re[0](15, 3));

  // Out-of-range index and missing imaginary channel are config errors.
  CHECK(run("export-slice --volume " + (d / "phantom.dcaf").string() +
            " --axis z --index 99 --out " + (work_root() / "x.png").string())
            .code == 2);
  CHECK(run("export-slice --volume " + (d / "phantom.dcaf").string() +
            " --axis q --index 0 --out " + (work_root() / "x.png").string())
            .code == 2);
}

TEST_CASE("denoiser-train produces weights that reconstruct can consume") {
  const fs::path dcdn = work_root() / "denoiser.dcdn";
  const RunResult r = run("denoiser-train --sigma 0.1 --steps 30 --textures 4 "
                          "--size 48 --seed 5 --out " +
                          dcdn.string());
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dcdn));
  CHECK(read_bytes(dcdn).substr(0, 4) == "DCDN");

  // The 10-layer net sees a 21-pixel neighbourhood, so the reconstruction
  // grid must be at least that large laterally.
  const fs::path big = work_root() / "sim_cnn";
  json sim_cfg = base_config(big.string());
  sim_cfg["grid"]["nx"] = 24;
  sim_cfg["grid"]["ny"] = 24;
  REQUIRE(run("simulate --config " +
              write_config("sim_cnn.json", sim_cfg).string())
              .code == 0);

  const fs::path out = work_root() / "rec_cnn";
  json cfg = sim_cfg;
  cfg["paths"] = {{"out_dir", out.string()},
                  {"measurements", (big / "measurements.dcam").string()}};
  cfg["denoiser"] = {{"kind", "dncnn"}, {"sigma", 0.1},
                     {"weights", dcdn.string()}};
  cfg["schedule"]["iters"] = 2;
  const fs::path p = write_config("rec_cnn.json", cfg);
  REQUIRE(run("reconstruct --config " + p.string()).code == 0);
  const json summary = read_json(out / "summary.json");
  CHECK(summary["denoiser"] == "cnn");  // canonical name ("dncnn" is an input alias)

  CHECK(run("denoiser-train --sigma -0.5 --out " +
            (work_root() / "bad.dcdn").string())
            .code == 2);
}

TEST_CASE("ablate runs every variant and the baseline sweep") {
  const fs::path out = work_root() / "ablate";
  json cfg = recon_config(out.string());
  cfg["schedule"]["iters"] = 3;
  cfg["schedule"]["log_every"] = 3;
  const fs::path p = write_config("ablate.json", cfg);
  const RunResult r = run("ablate --config " + p.string() + " --tau 1e-4 --tau 1e-2");
  REQUIRE(r.code == 0);

  const json doc = read_json(out / "ablation.json");
  REQUIRE(doc.contains("variants"));
  for (const char* name : {"full", "AC", "NR", "Noreg"}) {
    CHECK(doc["variants"].contains(name));
    CHECK(fs::exists(out / (std::string("volume_") + name + ".dcaf")));
    CHECK(fs::exists(out / (std::string("log_") + name + ".csv")));
  }
  CHECK(doc.contains("tikhonov"));
  CHECK(fs::exists(out / "tikhonov.dcaf"));
  CHECK(fs::exists(out / "ablation.csv"));

  std::ifstream tab(out / "ablation.csv");
  std::string header;
  std::getline(tab, header);
  CHECK(header.find("psnr") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(tab, line);) ++rows;
  CHECK(rows == 5);  // four variants + best-tau baseline
}
