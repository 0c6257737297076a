// Command line driver: period matrices, refinement sweeps, exponential and
// polynomial experiments, electrical move scripts.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "drs/functions.hpp"
#include "drs/harmonic.hpp"
#include "drs/io_json.hpp"
#include "drs/moves.hpp"

using namespace drs;

namespace {

int exit_code_for(const error& e) {
  switch (e.code) {
    case errc::solver_fail:
      return 4;
    case errc::bad_configuration:
    case errc::not_a_loop_quad:
      return 3;
    default:
      return 2;
  }
}

struct FixtureArgs {
  std::vector<double> square;   // p q theta
  std::vector<double> tri_hex;  // r1 r2 r3 p q
  std::vector<int> genus2;      // p q
  std::string input;
  unsigned seed = 0;

  // Builds the complex and, when the generator provides them, aligned cycles.
  struct Built {
    DoubleComplex dc;
    std::optional<TorusFixture> fixture;
  };
  Built build() const {
    int given = (!square.empty()) + (!tri_hex.empty()) + (!genus2.empty()) +
                (!input.empty());
    if (given != 1)
      throw error(errc::bad_input,
                  "choose exactly one of --square-torus, --tri-hex, --genus2, --input");
    if (!square.empty()) {
      TorusFixture fx = square_torus(static_cast<int>(square[0]),
                                     static_cast<int>(square[1]), square[2]);
      return {fx.map.dc, fx};
    }
    if (!tri_hex.empty()) {
      TorusFixture fx =
          tri_hex_torus(tri_hex[0], tri_hex[1], tri_hex[2],
                        static_cast<int>(tri_hex[3]), static_cast<int>(tri_hex[4]));
      return {fx.map.dc, fx};
    }
    if (!genus2.empty()) return {glued_tori_genus2(genus2[0], genus2[1], seed), {}};
    return {load_complex_file(input), {}};
  }
};

void add_fixture_flags(CLI::App* cmd, FixtureArgs& fx) {
  cmd->add_option("--square-torus", fx.square, "p q theta")->expected(3);
  cmd->add_option("--tri-hex", fx.tri_hex, "r1 r2 r3 p q")->expected(5);
  cmd->add_option("--genus2", fx.genus2, "p q (two glued tori, random rho)")
      ->expected(2);
  cmd->add_option("--input", fx.input, "complex JSON file");
  cmd->add_option("--seed", fx.seed, "seed for randomized fixtures");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::fwrite(text.data(), 1, text.size(), stdout);
  else
    write_file(path, text);
}

PeriodData run_periods(const FixtureArgs::Built& built) {
  if (built.fixture) {
    CanonicalDissection d = canonical_dissection(
        built.dc, {built.fixture->cycle_a, built.fixture->cycle_b});
    return compute_periods(built.dc, d);
  }
  return compute_periods(built.dc);
}

int cmd_periods(const FixtureArgs& fx, const std::string& out) {
  auto built = fx.build();
  if (!built.dc.closed())
    throw error(errc::not_closed_surface, "periods need a closed surface");
  PeriodData pd = run_periods(built);
  emit(out, periods_report_json(pd) + "\n");
  return 0;
}

DoubleComplex with_rho(const DoubleComplex& dc, const std::vector<double>& rho) {
  std::vector<std::array<int, 4>> quads;
  std::vector<Graph> colors;
  std::vector<int> partner(4 * dc.quad_count(), -1);
  for (int q = 0; q < dc.quad_count(); ++q) {
    quads.push_back(dc.quad(q));
    for (int s = 0; s < 4; ++s) {
      Slot p = dc.partner(q, s);
      if (p.valid()) partner[4 * q + s] = 4 * p.quad + p.side;
    }
  }
  for (int v = 0; v < dc.vertex_count(); ++v) colors.push_back(dc.vertex_graph(v));
  return DoubleComplex::build_glued(quads, rho, partner, colors);
}

int cmd_converge(const FixtureArgs& fx, int levels, double perturb,
                 const std::string& out) {
  if (fx.square.empty() && fx.tri_hex.empty())
    throw error(errc::bad_input, "converge needs --square-torus or --tri-hex");
  auto built = fx.build();
  TorusFixture fixture = *built.fixture;
  CriticalMap map = fixture.map;
  Chain a = fixture.cycle_a, b = fixture.cycle_b;
  std::ostringstream csv;
  csv << "level,delta,pi_gap,pi_vs_modulus\n";
  std::mt19937 rng(fx.seed);
  for (int level = 0; level < levels; ++level) {
    DoubleComplex dc = map.dc;
    if (perturb > 0) {
      std::uniform_real_distribution<double> d(-perturb, perturb);
      std::vector<double> rho;
      for (int q = 0; q < dc.quad_count(); ++q)
        rho.push_back(dc.rho_gamma(q) * std::exp(d(rng)));
      dc = with_rho(dc, rho);
    }
    PeriodData pd = compute_periods(dc, canonical_dissection(dc, {a, b}));
    double gap = (pd.pi_gamma - pd.pi_gamma_star).cwiseAbs().maxCoeff();
    double err = std::abs(pd.pi_gamma(0, 0) - fixture.tau);
    csv << level << "," << fmt_double(map.delta) << "," << fmt_double(gap) << ","
        << fmt_double(err) << "\n";
    if (level + 1 < levels) {
      CriticalMap fine = refine(map);
      a = refine_cycle(map, fine, a);
      b = refine_cycle(map, fine, b);
      map = std::move(fine);
    }
  }
  emit(out, csv.str());
  return 0;
}

int cmd_special(const std::string& kind, cplx lambda, int k, int chain_n, int sextant,
                std::vector<double> square, const std::string& out) {
  std::ostringstream csv;
  csv << "re_z,im_z,re_f,im_f,re_f_cont,im_f_cont\n";
  double max_err = 0;
  auto emit_row = [&](cplx z, cplx f, cplx cont) {
    csv << fmt_double(z.real()) << "," << fmt_double(z.imag()) << ","
        << fmt_double(f.real()) << "," << fmt_double(f.imag()) << ","
        << fmt_double(cont.real()) << "," << fmt_double(cont.imag()) << "\n";
    max_err = std::max(max_err, std::abs(f - cont));
  };
  if (chain_n > 0) {
    if (kind != "power")
      throw error(errc::bad_input, "--chain supports the power experiment only");
    auto zk = chain_powers(chain_n, k);
    for (int i = 0; i <= chain_n; ++i) {
      double x = static_cast<double>(i) / chain_n;
      emit_row(x, zk[k][i], std::pow(x, k));
    }
  } else {
    CriticalMap patch;
    std::vector<char> keep;
    if (sextant > 0) {
      patch = tri_hex_patch(sextant);
      keep.assign(patch.dc.vertex_count(), 0);
      for (int v = 0; v < patch.dc.vertex_count(); ++v) {
        cplx z = patch.z(v);
        double arg = std::arg(z);
        if (std::abs(z) < 1e-12 ||
            (arg > -1e-9 && arg < std::numbers::pi / 3 + 1e-9))
          keep[v] = 1;
      }
    } else if (square.size() == 2) {
      patch = square_patch(static_cast<int>(square[0]), static_cast<int>(square[0]),
                           square[1]);
      keep.assign(patch.dc.vertex_count(), 1);
    } else {
      throw error(errc::bad_input, "need --chain, --sextant or --square");
    }
    Cochain f(patch.dc, Carrier::lambda, 0);
    if (kind == "exp") {
      f = exponential(patch, lambda);
    } else if (kind == "power") {
      f = powers(patch, k)[k];
    } else {
      throw error(errc::bad_input, "special kind must be exp or power");
    }
    for (int v = 0; v < patch.dc.vertex_count(); ++v) {
      if (!keep[v]) continue;
      cplx z = patch.z(v);
      cplx cont = kind == "exp" ? std::exp(lambda * z) : std::pow(z, k);
      emit_row(z, f.val[v], cont);
    }
  }
  csv << "# max_error," << fmt_double(max_err) << "\n";
  emit(out, csv.str());
  return 0;
}

int cmd_moves(const FixtureArgs& fx, const std::string& script_path,
              const std::string& out, bool trace_dim) {
  auto built = fx.build();
  MarkedSurface start = mark(built.dc);
  std::vector<MoveScriptEntry> script;
  if (!script_path.empty()) script = load_move_script(read_file(script_path));
  MoveReport rep = run_move_script(start, script, trace_dim);
  emit(out, move_report_json(rep) + "\n");
  if (rep.failed_index >= 0) {
    std::cerr << "move " << rep.failed_index << " failed: " << rep.failure << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete Riemann surface toolkit"};
  app.require_subcommand(1);

  FixtureArgs fx_periods, fx_converge, fx_moves;
  std::string out_periods, out_converge, out_special, out_moves, script_path;
  int levels = 3;
  double perturb = 0;
  std::string special_kind;
  std::string lambda_str = "1";
  int power_k = 0, chain_n = 0, sextant = 0;
  std::vector<double> special_square;
  bool trace_dim = false;

  CLI::App* periods = app.add_subcommand("periods", "period matrix pipeline");
  add_fixture_flags(periods, fx_periods);
  periods->add_option("--output,-o", out_periods, "output JSON (default stdout)");

  CLI::App* converge = app.add_subcommand("converge", "refinement sweep");
  add_fixture_flags(converge, fx_converge);
  converge->add_option("--levels", levels, "refinement levels")->default_val(3);
  converge->add_option("--perturb", perturb, "log-uniform rho perturbation");
  converge->add_option("--output,-o", out_converge, "output CSV");

  CLI::App* special = app.add_subcommand("special", "exponential / power data");
  special->add_option("kind", special_kind, "exp or power")->required();
  special->add_option("--lambda", lambda_str, "complex parameter, e.g. 1.0+0.5i");
  special->add_option("--k", power_k, "power degree");
  special->add_option("--chain", chain_n, "1-d chain {0..n}/n");
  special->add_option("--sextant", sextant, "tri-hex patch radius, sextant output");
  special->add_option("--square", special_square, "n theta square patch")->expected(2);
  special->add_option("--output,-o", out_special, "output CSV");

  CLI::App* moves = app.add_subcommand("moves", "electrical move scripts");
  add_fixture_flags(moves, fx_moves);
  moves->add_option("--script", script_path, "JSON move script");
  moves->add_flag("--trace-dim", trace_dim, "trace the holomorphic dimension");
  moves->add_option("--output,-o", out_moves, "output JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (periods->parsed()) return cmd_periods(fx_periods, out_periods);
    if (converge->parsed())
      return cmd_converge(fx_converge, levels, perturb, out_converge);
    if (special->parsed()) {
      // parse a+bi / a-bi / a
      double re = 0, im = 0;
      char sign = '+';
      std::istringstream ss(lambda_str);
      ss >> re;
      if (ss >> sign) {
        ss >> im;
        if (sign == '-') im = -im;
      }
      return cmd_special(special_kind, cplx(re, im), power_k, chain_n, sextant,
                         special_square, out_special);
    }
    if (moves->parsed())
      return cmd_moves(fx_moves, script_path, out_moves, trace_dim);
  } catch (const error& e) {
    std::cerr << errc_name(e.code) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
