#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <epsilon/epsilon.hpp>

using namespace eps;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
}

int run_solve(const std::string& inst_path, std::uint64_t fuel,
              const std::string& out_path) {
  ParsedInstance inst = parse_instance(read_file(inst_path));
  Tower tw(inst.sig, inst.crits, TowerConfig{fuel});
  SolveOutcome out = solve(tw);
  std::vector<std::string> lines = substitution_lines(inst.sig, out.answer);
  for (const auto& l : lines) std::cout << l << "\n";
  if (!out_path.empty()) {
    std::string m = std::string(kMachineHeader) + "\n";
    m += "command solve\n";
    m += std::string("status ") + (out.solved ? "ok" : "verification-failed") +
         "\n";
    m += "entries " + std::to_string(lines.size()) + "\n";
    for (const auto& l : lines) m += l + "\n";
    write_file(out_path, m);
  }
  if (!out.solved) {
    std::cerr << "verification failed: " << out.note << "\n";
    return 1;
  }
  return 0;
}

int run_verify(const std::string& inst_path, const std::string& subst_path) {
  ParsedInstance inst = parse_instance(read_file(inst_path));
  EpsSubstitution s = parse_substitution(read_file(subst_path), inst.sig);
  std::cout << kMachineHeader << "\n";
  bool solving = true;
  for (std::size_t i = 0; i < inst.crits.size(); ++i) {
    bool ok = models_defaulted(inst.sig, s,
                               as_implication(inst.sig, inst.crits[i]));
    solving = solving && ok;
    std::cout << "formula " << i << ": " << (ok ? "OK" : "FAIL") << "\n";
  }
  bool correct = is_correct(inst.sig, s);
  std::cout << "solving: " << (solving ? "OK" : "FAIL") << "\n";
  std::cout << "correctness: " << (correct ? "OK" : "FAIL") << "\n";
  return solving && correct ? 0 : 1;
}

int run_trace(const std::string& inst_path, std::uint64_t fuel,
              const std::string& trace_dir) {
  ParsedInstance inst = parse_instance(read_file(inst_path));
  Tower tw(inst.sig, inst.crits, TowerConfig{fuel});
  SolveOutcome out = solve(tw);
  std::error_code ec;
  std::filesystem::create_directories(trace_dir, ec);
  if (ec)
    throw std::ios_base::failure("cannot create '" + trace_dir + "'");
  std::cout << kMachineHeader << "\n";
  bool all_ok = out.solved;

  {
    std::ostringstream f;
    write_trace(f, "select", 1, out.selection.trace);
    write_file(trace_dir + "/select.trace", f.str());
  }
  InjuryReport sel = check_finite_injury(out.selection.trace);
  std::cout << "select strict " << (sel.ok ? "PASS" : "FAIL") << "\n";
  all_ok = all_ok && sel.ok;

  for (std::size_t i = 1; i <= out.chain_traces.size(); ++i) {
    const Trace& t = out.chain_traces[i - 1];
    std::ostringstream f;
    write_trace(f, "chain", static_cast<std::uint32_t>(i), t);
    write_file(trace_dir + "/chain_" + std::to_string(i) + ".trace", f.str());
    InjuryReport rep =
        check_weakly_finite_injury(t, weak_run_bound(inst.sig, inst.crits, t));
    std::cout << "chain " << i << " weak " << (rep.ok ? "PASS" : "FAIL")
              << "\n";
    all_ok = all_ok && rep.ok;
  }
  if (!out.solved) std::cerr << "verification failed: " << out.note << "\n";
  return all_ok ? 0 : 1;
}

int run_ordinal(const std::string& trace_path) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + trace_path + "'");
  TraceFile tf = read_trace(in);
  std::vector<Path> nodes;
  nodes.reserve(tf.trace.size());
  for (const auto& st : tf.trace) nodes.push_back(st.image);
  DescentReport rep = verify_descent(tf.trace, observed_height(std::move(nodes)));
  std::cout << kMachineHeader << "\n";
  if (!rep.ok) {
    std::cout << "descent: FAIL (" << rep.reason << " at steps " << rep.at_i
              << "," << rep.at_j << ")\n";
    return 1;
  }
  for (std::size_t k = 1; k < rep.ordinals.size(); ++k)
    std::cout << "o decreases: " << rep.ordinals[k - 1] << " -> "
              << rep.ordinals[k] << "\n";
  std::cout << "descent: PASS\n";
  return 0;
}

int run_gen(const GenConfig& cfg, const std::string& out_path) {
  std::string text = generate_instance(cfg);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epsilon substitution engine"};
  app.require_subcommand(1);

  std::string inst_path, subst_path, trace_path, out_path;
  std::string trace_dir = ".";
  std::uint64_t fuel = 1'000'000;
  GenConfig gcfg;

  CLI::App* c_solve =
      app.add_subcommand("solve", "solve an instance, print the substitution");
  c_solve->add_option("instance", inst_path, "instance file")->required();
  c_solve->add_option("--fuel", fuel, "step budget per level");
  c_solve->add_option("--out", out_path, "machine-readable result file");

  CLI::App* c_verify = app.add_subcommand(
      "verify", "check a substitution file against an instance");
  c_verify->add_option("instance", inst_path, "instance file")->required();
  c_verify->add_option("substitution", subst_path, "term := value lines")
      ->required();

  CLI::App* c_trace = app.add_subcommand(
      "trace", "solve and write per-level injury trace files");
  c_trace->add_option("instance", inst_path, "instance file")->required();
  c_trace->add_option("--fuel", fuel, "step budget per level");
  c_trace->add_option("--trace-dir", trace_dir, "output directory");

  CLI::App* c_ordinal = app.add_subcommand(
      "ordinal", "check ordinal descent along a recorded trace");
  c_ordinal->add_option("trace", trace_path, "trace file")->required();

  CLI::App* c_gen =
      app.add_subcommand("gen", "generate a random rank-one instance");
  c_gen->add_option("--seed", gcfg.seed, "rng seed");
  c_gen->add_option("--formulas", gcfg.formulas, "critical formulas to emit");
  c_gen->add_option("--max-witness", gcfg.max_witness, "numeral bound");
  c_gen->add_option("--out", out_path, "write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_solve->parsed()) return run_solve(inst_path, fuel, out_path);
    if (c_verify->parsed()) return run_verify(inst_path, subst_path);
    if (c_trace->parsed()) return run_trace(inst_path, fuel, trace_dir);
    if (c_ordinal->parsed()) return run_ordinal(trace_path);
    if (c_gen->parsed()) return run_gen(gcfg, out_path);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const FuelExhausted& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 1;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
