// Command-line front end: presentations, chain partitions, atom extraction,
// projections, the two adversarial constructions with their decoders, and
// isometry synthesis, all emitting JSON artifacts.
//
// Exit codes: 0 success, 1 malformed input, 2 validation/verification failure,
// 3 insufficient stage, depth, or precision.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "lpdis/json_io.hpp"

using namespace lpdis;
using lpdis::io::json;

namespace {

struct checked_failure : std::runtime_error {  // mapped to exit 2
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw parse_error(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return j;
}

json parse_inline_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("bad JSON argument: ") + e.what());
  }
}

// --pres accepts "dyadic", "hybrid:N", or a descriptor file path
json presentation_descriptor(const std::string& arg) {
  if (arg == "dyadic") return json{{"kind", "dyadic"}};
  if (arg.rfind("hybrid:", 0) == 0)
    return json{{"kind", "hybrid"}, {"n", std::stoul(arg.substr(7))}};
  return read_json_file(arg);
}

std::vector<CESetSchedule> read_schedule_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw parse_error("no schedule files in " + dir);
  std::vector<CESetSchedule> out;
  for (auto& f : files) out.push_back(io::schedule_from(read_json_file(f.string())));
  return out;
}

void emit(const json& artifact, const std::string& out_path) {
  std::string text = artifact.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw parse_error("cannot write " + out_path);
    out << text;
  }
}

void warn_exponent(const Exponent& p) {
  if (p.is_two())
    std::cerr << "warning: p = 2 is outside the supported theory; results are unchecked\n";
}

struct CommonFlags {
  std::string p = "3";
  int k = 20;
  int depth = 6;
  int stage = 8;
  unsigned long long seed = 7;
  std::string out;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"validated computable presentations of hybrid Lp spaces"};
  app.require_subcommand(1);
  CommonFlags flags;

  // validate
  std::string tree_path;
  auto* validate = app.add_subcommand("validate", "check the disintegration axioms on a tree");
  validate->add_option("--tree", tree_path, "materialized tree JSON")->required();
  validate->add_option("--p", flags.p, "exponent p (rational, >= 1)");
  validate->add_option("-o,--out", flags.out, "artifact path (default stdout)");

  // norm
  std::string pres_arg = "dyadic";
  std::string coeffs_arg;
  auto* norm_cmd = app.add_subcommand("norm", "rational-vector norm from oracle data");
  norm_cmd->add_option("--pres", pres_arg, "dyadic | hybrid:N | descriptor.json");
  norm_cmd->add_option("--coeffs", coeffs_arg, R"(e.g. {"0":"1","1":"-1"})")->required();
  norm_cmd->add_option("--p", flags.p, "exponent");
  norm_cmd->add_option("--k", flags.k, "precision 2^-k");
  norm_cmd->add_option("--stage", flags.stage, "enumeration stage");
  norm_cmd->add_option("-o,--out", flags.out, "artifact path");

  // chains
  auto* chains_cmd = app.add_subcommand("chains", "stagewise anm chain partition");
  chains_cmd->add_option("--pres", pres_arg)->required();
  chains_cmd->add_option("--p", flags.p);
  chains_cmd->add_option("--depth", flags.depth);
  chains_cmd->add_option("--stage", flags.stage);
  chains_cmd->add_option("--k", flags.k);
  chains_cmd->add_option("-o,--out", flags.out);

  // atoms
  std::string eps_arg = "1/8";
  auto* atoms_cmd = app.add_subcommand("atoms", "candidate atoms from chain limits");
  atoms_cmd->add_option("--pres", pres_arg)->required();
  atoms_cmd->add_option("--p", flags.p);
  atoms_cmd->add_option("--depth", flags.depth);
  atoms_cmd->add_option("--stage", flags.stage);
  atoms_cmd->add_option("--eps", eps_arg, "p-mass threshold");
  atoms_cmd->add_option("--k", flags.k);
  atoms_cmd->add_option("-o,--out", flags.out);

  // project
  std::string node_arg;
  auto* project_cmd = app.add_subcommand("project", "projection onto the nonatomic part");
  project_cmd->add_option("--pres", pres_arg)->required();
  project_cmd->add_option("--node", node_arg, "node path, e.g. 0.1.3 (root: \"\")");
  project_cmd->add_option("--p", flags.p);
  project_cmd->add_option("--depth", flags.depth);
  project_cmd->add_option("--stage", flags.stage);
  project_cmd->add_option("--k", flags.k);
  project_cmd->add_option("-o,--out", flags.out);

  // adversary finite | infinite
  auto* adversary = app.add_subcommand("adversary", "adversarial presentations");
  adversary->require_subcommand(1);
  unsigned long adv_n = 1;
  std::string schedule_path, schedules_dir;
  int j_max = 48;
  auto* adv_fin = adversary->add_subcommand("finite", "finitely atomic construction");
  adv_fin->add_option("--n", adv_n, "number of atoms")->required();
  adv_fin->add_option("--schedule", schedule_path, "schedule JSON")->required();
  adv_fin->add_option("--j-max", j_max, "length of the materialized q prefix");
  adv_fin->add_option("--p", flags.p);
  adv_fin->add_option("--depth", flags.depth);
  adv_fin->add_option("--k", flags.k);
  adv_fin->add_option("-o,--out", flags.out);
  auto* adv_inf = adversary->add_subcommand("infinite", "infinitely atomic construction");
  adv_inf->add_option("--schedules", schedules_dir, "directory of schedule JSONs")->required();
  adv_inf->add_option("--p", flags.p);
  adv_inf->add_option("--depth", flags.depth);
  adv_inf->add_option("--k", flags.k);
  adv_inf->add_option("-o,--out", flags.out);

  // decode gamma | bits | fin
  auto* decode = app.add_subcommand("decode", "information extraction from projections");
  decode->require_subcommand(1);
  int bits_m = 8;
  unsigned long fin_e = 0;
  auto* dec_gamma = decode->add_subcommand("gamma", "enclose the hidden left-c.e. real");
  dec_gamma->add_option("--schedule", schedule_path)->required();
  dec_gamma->add_option("--n", adv_n, "number of atoms of the instance");
  dec_gamma->add_option("--j-max", j_max);
  dec_gamma->add_option("--p", flags.p);
  dec_gamma->add_option("--k", flags.k);
  dec_gamma->add_option("-o,--out", flags.out);
  auto* dec_bits = decode->add_subcommand("bits", "recover W from the gamma enclosure");
  dec_bits->add_option("--schedule", schedule_path)->required();
  dec_bits->add_option("--m", bits_m, "recover membership for 0..m");
  dec_bits->add_option("--n", adv_n);
  dec_bits->add_option("--j-max", j_max);
  dec_bits->add_option("--p", flags.p);
  dec_bits->add_option("-o,--out", flags.out);
  auto* dec_fin = decode->add_subcommand("fin", "decide finiteness of W_e");
  dec_fin->add_option("--schedules", schedules_dir)->required();
  dec_fin->add_option("--e", fin_e)->required();
  dec_fin->add_option("--p", flags.p);
  dec_fin->add_option("-o,--out", flags.out);

  // isometry build | verify
  auto* isometry_cmd = app.add_subcommand("isometry", "synthesize and check the glued map");
  isometry_cmd->require_subcommand(1);
  std::string target_arg, map_path, tol_arg = "1/64";
  int max_level = 3, samples = 100;
  auto* iso_build = isometry_cmd->add_subcommand("build", "glue T1 and T2 onto a target");
  iso_build->add_option("--target", target_arg, "hybrid:N | descriptor.json")->required();
  iso_build->add_option("--p", flags.p);
  iso_build->add_option("--depth", flags.depth);
  iso_build->add_option("--stage", flags.stage);
  iso_build->add_option("--k", flags.k);
  iso_build->add_option("--level", max_level, "finest dyadic generator level");
  iso_build->add_option("-o,--out", flags.out);
  auto* iso_verify = isometry_cmd->add_subcommand("verify", "norm preservation on samples");
  iso_verify->add_option("--map", map_path, "map JSON from isometry build")->required();
  iso_verify->add_option("--samples", samples);
  iso_verify->add_option("--seed", flags.seed);
  iso_verify->add_option("--k", flags.k);
  iso_verify->add_option("--tol", tol_arg, "tolerance (rational)");
  iso_verify->add_option("-o,--out", flags.out);

  CLI11_PARSE(app, argc, argv);

  try {
    Exponent p = Exponent::parse(flags.p);
    warn_exponent(p);

    if (validate->parsed()) {
      auto tree = io::tree_from(read_json_file(tree_path));
      auto report = validate_disintegration(tree, p);
      emit(io::to_json(report), flags.out);
      if (!report.all_passed()) return 2;
      return 0;
    }

    if (norm_cmd->parsed()) {
      auto oracle = io::load_presentation(presentation_descriptor(pres_arg), p);
      auto coeffs = io::coeffs_from(parse_inline_json(coeffs_arg));
      auto enc = rational_vector_norm(*oracle, coeffs, flags.stage, flags.k);
      emit(json{{"norm", io::to_json(enc)}, {"p", format_rational(p.value())},
                {"k", flags.k}, {"stage", flags.stage}},
           flags.out);
      return 0;
    }

    if (chains_cmd->parsed()) {
      auto oracle = io::load_presentation(presentation_descriptor(pres_arg), p);
      auto part = partition_chains(*oracle, flags.depth, flags.stage, flags.k);
      emit(io::to_json(part), flags.out);
      return 0;
    }

    if (atoms_cmd->parsed()) {
      auto oracle = io::load_presentation(presentation_descriptor(pres_arg), p);
      auto part = partition_chains(*oracle, flags.depth, flags.stage, flags.k);
      auto ext = extract_atoms(*oracle, part, parse_rational(eps_arg), flags.k);
      json candidates = json::array();
      for (auto& a : ext.candidates) candidates.push_back(io::to_json(a));
      emit(json{{"candidates", candidates},
                {"vanishing_chains", ext.vanishing_chains},
                {"candidates_disjoint", ext.candidates_disjoint},
                {"eps", eps_arg}},
           flags.out);
      return 0;
    }

    if (project_cmd->parsed()) {
      auto oracle = io::load_presentation(presentation_descriptor(pres_arg), p);
      auto part = partition_chains(*oracle, flags.depth, flags.stage, flags.k);
      auto res = project_node(*oracle, part, NodePath::parse(node_arg), flags.k);
      emit(io::to_json(res), flags.out);
      return 0;
    }

    if (adv_fin->parsed()) {
      auto schedule = io::schedule_from(read_json_file(schedule_path));
      auto lce = left_ce_from_schedule(schedule, j_max);
      auto tree =
          materialize_finite_atomic(adv_n, lce.gamma(), [&] {
            std::vector<Rational> qs;
            for (int j = 0; j <= j_max; ++j) qs.push_back(lce.q(j));
            return qs;
          }(), p, flags.depth, flags.k);
      json artifact = io::to_json(tree);
      artifact["kind"] = "finite_atomic";
      artifact["n"] = adv_n;
      artifact["gamma"] = format_rational(lce.gamma());
      artifact["p"] = format_rational(p.value());
      artifact["depth"] = flags.depth;
      emit(artifact, flags.out);
      return 0;
    }

    if (adv_inf->parsed()) {
      InfiniteAtomicBuilder b;
      b.schedules = read_schedule_dir(schedules_dir);
      auto tree = materialize_infinite_atomic(b, p, flags.depth, flags.k);
      json artifact = io::to_json(tree);
      artifact["kind"] = "infinite_atomic";
      artifact["p"] = format_rational(p.value());
      artifact["depth"] = flags.depth;
      emit(artifact, flags.out);
      return 0;
    }

    if (dec_gamma->parsed() || dec_bits->parsed()) {
      auto schedule = io::schedule_from(read_json_file(schedule_path));
      auto lce = left_ce_from_schedule(schedule, j_max);
      FiniteAtomicOracle oracle(adv_n, lce, p);
      auto po = FiniteAtomicProjection::onto_atom(oracle, 0);
      if (dec_gamma->parsed()) {
        auto enc = decode_gamma(po, p, flags.k);
        emit(json{{"gamma_enclosure", io::to_json(enc)}, {"k", flags.k}}, flags.out);
        return 0;
      }
      // bits: width below 3^-(m+4) needs k > (m+4) log2(3)
      int k_needed = static_cast<int>((bits_m + 5) * 1.585) + 2;
      auto enc = decode_gamma(po, p, k_needed);
      auto bits = decode_membership(enc, bits_m);
      json out_bits = json::array();
      for (bool b : bits) out_bits.push_back(b ? 1 : 0);
      emit(json{{"bits", out_bits}, {"m", bits_m}}, flags.out);
      return 0;
    }

    if (dec_fin->parsed()) {
      InfiniteAtomicBuilder b;
      b.schedules = read_schedule_dir(schedules_dir);
      InfiniteAtomicProjection po{InfiniteAtomicOracle(std::move(b), p, true)};
      bool in_fin = decode_fin(po, fin_e);
      emit(json{{"e", fin_e}, {"in_fin", in_fin}}, flags.out);
      return 0;
    }

    if (iso_build->parsed()) {
      json descriptor = presentation_descriptor(target_arg);
      auto oracle = io::load_presentation(descriptor, p);
      auto po = io::load_projection(descriptor, p);
      auto part = partition_chains(*oracle, flags.depth + 2, flags.stage, flags.k);
      auto ext = extract_atoms(*oracle, part, Rational(1, 8), flags.k);
      auto t1 = build_T1(*oracle, ext.candidates, flags.k);
      auto t2 = build_T2(*oracle, *po, flags.depth, flags.stage, flags.k, max_level);
      auto T = glue(t1, t2);
      json artifact = io::to_json(T);
      artifact["p"] = format_rational(p.value());
      artifact["target"] = descriptor;
      emit(artifact, flags.out);
      return 0;
    }

    if (iso_verify->parsed()) {
      json j = read_json_file(map_path);
      PartialIsometry T = io::isometry_from(j);
      Exponent pm = j.contains("p") ? Exponent::parse(j.at("p").get<std::string>()) : p;
      auto rep = verify_isometry(T, pm, samples, flags.seed, flags.k,
                                 parse_rational(tol_arg));
      json out{{"samples", rep.samples},
               {"seed", flags.seed},
               {"tolerance", format_rational(rep.tolerance)},
               {"max_deviation", format_rational(rep.max_deviation)},
               {"all_within", rep.all_within},
               {"scaling_exact", rep.scaling_exact},
               {"failures", rep.failures}};
      emit(out, flags.out);
      if (!rep.all_within) return 2;
      return 0;
    }

    throw parse_error("no subcommand executed");
  } catch (const insufficient_stage& e) {
    emit(json{{"error", {{"kind", "insufficient_stage"}, {"message", e.what()}}}}, "");
    return 3;
  } catch (const depth_exceeded& e) {
    emit(json{{"error", {{"kind", "depth_exceeded"}, {"message", e.what()}}}}, "");
    return 3;
  } catch (const insufficient_precision& e) {
    emit(json{{"error", {{"kind", "insufficient_precision"}, {"message", e.what()}}}}, "");
    return 3;
  } catch (const checked_failure& e) {
    emit(json{{"error", {{"kind", "check_failed"}, {"message", e.what()}}}}, "");
    return 2;
  } catch (const std::exception& e) {
    emit(json{{"error", {{"kind", "bad_input"}, {"message", e.what()}}}}, "");
    return 1;
  }
}
