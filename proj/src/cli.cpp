// SPDX-License-Identifier: Apache-2.0

#include "opconn/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <sstream>

#include "opconn/classify.hpp"
#include "opconn/connection.hpp"
#include "opconn/error.hpp"
#include "opconn/io.hpp"
#include "opconn/measure.hpp"
#include "opconn/solver.hpp"
#include "opconn/text.hpp"

namespace opconn::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUnsolved = 2;

struct Options {
  std::string fn;
  std::string measure;
  double scale = 1.0;
  std::string a_path;
  std::string b_path;
  std::string out_path;
  std::string xs;
  int trials = 100;
  int dim = 4;
  std::uint64_t seed = 0;
  Tolerances tol;
};

void add_connection_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--fn", o.fn, "representing function spec");
  cmd->add_option("--measure", o.measure, "associated measure spec");
  cmd->add_option("--scale", o.scale, "scalar multiple k >= 0");
}

void add_tolerance_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--tol-psd", o.tol.psd_tol, "PSD validation tolerance");
  cmd->add_option("--tol-order", o.tol.order_tol, "Loewner order tolerance");
  cmd->add_option("--tol-range", o.tol.range_tol, "range membership tolerance");
  cmd->add_option("--tol-solve", o.tol.solve_rtol, "relative solve residual tolerance");
}

void add_operand_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--A", o.a_path, "matrix file for A")->required();
  cmd->add_option("--B", o.b_path, "matrix file for B")->required();
  cmd->add_option("--out", o.out_path, "write the resulting matrix here");
}

Connection build_connection(const Options &o) {
  if (!(o.scale >= 0.0) || !std::isfinite(o.scale)) {
    throw Error(ErrorKind::DomainError, "--scale must be a finite nonnegative number");
  }
  if (o.fn.empty() && o.measure.empty()) {
    throw Error(ErrorKind::Parse, "one of --fn or --measure is required");
  }
  if (!o.fn.empty() && !o.measure.empty()) {
    return Connection::from_both(FunctionSpec::parse(o.fn), FiniteMeasure::parse(o.measure), o.scale);
  }
  if (!o.fn.empty()) return Connection::from_function(FunctionSpec::parse(o.fn), o.scale);
  return Connection::from_measure(FiniteMeasure::parse(o.measure), o.scale);
}

PsdMatrixXd read_psd(const std::string &path, const Tolerances &tol) {
  return PsdMatrixXd(io::read_matrix_file(path).matrix.matrix(), tol.psd_tol);
}

std::vector<double> parse_points(const std::string &xs) {
  std::vector<double> out;
  for (auto piece : text::split(xs, ',')) out.push_back(text::parse_double(piece, "--x"));
  if (out.empty()) throw Error(ErrorKind::Parse, "--x needs at least one point");
  for (double x : out) {
    if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, "evaluation points must be nonnegative");
  }
  return out;
}

void maybe_write(const Options &o, const MatrixXd &m) {
  if (!o.out_path.empty()) io::write_matrix_file(o.out_path, m);
}

int cmd_eval(const Options &o, std::ostream &out) {
  const Connection sigma = build_connection(o);
  const PsdMatrixXd a = read_psd(o.a_path, o.tol);
  const PsdMatrixXd b = read_psd(o.b_path, o.tol);
  const PsdMatrixXd x = evaluate(sigma, a, b, o.tol);
  out << "connection: " << sigma.describe() << "\n";
  out << "result: " << io::format_matrix(x.matrix()) << "\n";
  maybe_write(o, x.matrix());
  return kExitOk;
}

int cmd_solve(const Options &o, bool right, std::ostream &out) {
  const Connection sigma = build_connection(o);
  const PsdMatrixXd a_psd = read_psd(o.a_path, o.tol);
  if (!(a_psd.min_eigenvalue() > o.tol.psd_tol)) {
    throw Error(ErrorKind::NotPd, "A must be positive definite");
  }
  const PdMatrixXd a(a_psd);
  const PsdMatrixXd b = read_psd(o.b_path, o.tol);
  const SolveReport report = right ? solve_right(sigma, a, b, o.tol) : solve_left(sigma, a, b, o.tol);
  out << "connection: " << sigma.describe() << "\n";
  out << "equation: " << (right ? "X s A = B" : "A s X = B") << "\n";
  out << report.to_text();
  if (!report.solved()) return kExitUnsolved;
  maybe_write(o, report.x->matrix());
  return kExitOk;
}

int cmd_classify(const Options &o, std::ostream &out) {
  const Connection sigma = build_connection(o);
  out << classify_connection(sigma).to_text();
  out << "regularity_evidence:\n";
  std::istringstream evidence(regularity_witness(sigma, o.dim, o.seed, o.tol).to_text());
  for (std::string line; std::getline(evidence, line);) out << "  " << line << "\n";
  return kExitOk;
}

int cmd_verify(const Options &o, std::ostream &out) {
  const Connection sigma = build_connection(o);
  const AxiomReport report = verify_axioms(sigma, o.trials, o.dim, o.seed, o.tol);
  out << report.to_text();
  return report.all_pass() ? kExitOk : kExitUnsolved;
}

int cmd_fn(const Options &o, std::ostream &out) {
  const Connection sigma = build_connection(o);
  const FunctionAnalysis analysis = sigma.analysis();
  out << "connection: " << sigma.describe() << "\n";
  out << "f0: " << text::format_double(analysis.props.f0) << "\n";
  out << "range: [" << text::format_double(analysis.range.lower) << ", "
      << text::format_double(analysis.range.upper) << (analysis.range.upper_attained ? "]" : ")")
      << "\n";
  out << "values:\n";
  for (double x : parse_points(o.xs)) {
    out << "  - x: " << text::format_double(x) << ", f: " << text::format_double(sigma.representing(x))
        << "\n";
  }
  return kExitOk;
}

int cmd_measure_fn(const Options &o, std::ostream &out) {
  if (o.measure.empty()) throw Error(ErrorKind::Parse, "--measure is required");
  const FiniteMeasure mu = FiniteMeasure::parse(o.measure).scaled(o.scale);
  out << "measure: " << mu.to_string() << "\n";
  out << "mass: " << text::format_double(mass(mu)) << "\n";
  out << "probability: " << (is_probability(mu) ? "true" : "false") << "\n";
  out << "atom_at_0: " << text::format_double(mu.atom_at(0.0)) << "\n";
  out << "atom_at_1: " << text::format_double(mu.atom_at(1.0)) << "\n";
  out << "values:\n";
  for (double x : parse_points(o.xs)) {
    out << "  - x: " << text::format_double(x) << ", f: " << text::format_double(fn_from_measure(mu, x))
        << "\n";
  }
  return kExitOk;
}

} // namespace

std::string grammar() {
  return R"(Connection specs (--fn):
  kind[:value] | kind[:name=value,...] | kind=<kind> name=value ...
  kinds: constant:k, scalar_identity:k, arithmetic:alpha, geometric:alpha,
         harmonic:alpha, quasi_arithmetic:p=<p>,alpha=<a>, logarithmic,
         dual_logarithmic
  aliases: left_trivial, right_trivial, identity, weighted_arithmetic,
           weighted_geometric, weighted_harmonic
Measures (--measure):
  atoms=[(t,w),...] density=<arcsine|uniform|table:v0;v1;...> scale=<s> nodes=<n>
Matrix files (--A, --B, --out):
  {"dim": n, "rows": [[a11, ..., a1n], ..., [an1, ..., ann]]}
Exit codes: 0 success, 1 input error, 2 no solution or failed check.
)";
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Kubo-Ando operator connections on PSD matrices", "opconn"};
  app.footer(grammar());
  app.require_subcommand(1);
  Options o;

  auto *eval = app.add_subcommand("eval", "evaluate A s B");
  add_connection_flags(eval, o);
  add_operand_flags(eval, o);
  add_tolerance_flags(eval, o);

  auto *solve = app.add_subcommand("solve", "solve A s X = B for X");
  add_connection_flags(solve, o);
  add_operand_flags(solve, o);
  add_tolerance_flags(solve, o);

  auto *solve_r = app.add_subcommand("solve-right", "solve X s A = B for X");
  add_connection_flags(solve_r, o);
  add_operand_flags(solve_r, o);
  add_tolerance_flags(solve_r, o);

  auto *classify = app.add_subcommand("classify", "cancellability and regularity");
  add_connection_flags(classify, o);
  add_tolerance_flags(classify, o);
  classify->add_option("--dim", o.dim, "dimension of the regularity witnesses");
  classify->add_option("--seed", o.seed, "master seed");

  auto *verify = app.add_subcommand("verify", "randomized axiom checks");
  add_connection_flags(verify, o);
  add_tolerance_flags(verify, o);
  verify->add_option("--trials", o.trials, "number of trials");
  verify->add_option("--dim", o.dim, "matrix dimension");
  verify->add_option("--seed", o.seed, "master seed");

  auto *fn = app.add_subcommand("fn", "evaluate the representing function");
  add_connection_flags(fn, o);
  fn->add_option("--x", o.xs, "comma-separated points")->required();

  auto *measure_fn = app.add_subcommand("measure-fn", "representing function of a measure");
  measure_fn->add_option("--measure", o.measure, "associated measure spec")->required();
  measure_fn->add_option("--scale", o.scale, "scalar multiple k >= 0");
  measure_fn->add_option("--x", o.xs, "comma-separated points")->required();

  std::vector<const char *> argv{"opconn"};
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInput;
  }

  try {
    o.tol.validate();
    if (eval->parsed()) return cmd_eval(o, out);
    if (solve->parsed()) return cmd_solve(o, false, out);
    if (solve_r->parsed()) return cmd_solve(o, true, out);
    if (classify->parsed()) return cmd_classify(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (fn->parsed()) return cmd_fn(o, out);
    if (measure_fn->parsed()) return cmd_measure_fn(o, out);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

} // namespace opconn::cli
