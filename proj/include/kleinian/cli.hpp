#pragma once

#include <CLI11.hpp>

#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kleinian.hpp"

namespace kleinian::cli {

/// Exit codes shared by every subcommand.
enum Exit : int { kOk = 0, kUsage = 1, kCheckFailed = 2, kIndeterminate = 3 };

/// Scan cells as CSV, row-major from im_min upward.
inline std::string encode_scan_csv(const ScanResult& r) {
  std::string out = "mu_re,mu_im,verdict,first_excluding_n,overlap_count\n";
  for (const ScanCell& c : r.cells)
    out += fmt17(c.mu.real()) + "," + fmt17(c.mu.imag()) + "," + verdict_tag(c.verdict) + "," +
           std::to_string(c.first_excluding_n) + "," + std::to_string(c.overlap) + "\n";
  return out;
}

/// "WxH".
inline std::pair<int, int> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw Error(ErrorCode::InvalidArgument, "resolution must be WxH");
  const double w = parse_double(text.substr(0, x)), h = parse_double(text.substr(x + 1));
  if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h))
    throw Error(ErrorCode::InvalidArgument, "resolution needs positive integers");
  return {static_cast<int>(w), static_cast<int>(h)};
}

/// Generators from a config: either `family` with `p` or `mu`, or a list `generators = a, b`
/// with one map per label under the prefix "<label>.". An optional map under "conjugator."
/// is applied to every generator as g x g^-1.
inline GeneratorSet generators_from_config(const Config& c) {
  GeneratorSet g;
  if (c.has("family")) {
    FamilyParams fp;
    fp.kind = parse_family_kind(c.get("family"));
    if (c.has("p")) fp.p = c.point("p");
    if (c.has("mu")) fp.mu = c.complex("mu");
    g = make_family(fp);
  } else {
    std::vector<std::string> labels;
    std::istringstream is(c.get("generators"));
    std::string item;
    while (std::getline(is, item, ',')) {
      item = trim(item);
      if (!item.empty()) labels.push_back(item);
    }
    if (labels.empty()) throw Error(ErrorCode::InvalidArgument, "no generators listed");
    std::vector<MobiusR3> maps;
    for (const auto& l : labels) maps.push_back(map_from_config(c, l + "."));
    g = GeneratorSet(c.get_or("name", "config"), labels, maps);
  }
  if (c.has("conjugator.type")) {
    const MobiusR3 h = map_from_config(c, "conjugator.");
    std::vector<MobiusR3> maps;
    for (int k = 0; k < g.rank(); ++k) maps.push_back(conjugate(h, g.map(k)));
    g = GeneratorSet(g.name(), g.labels(), maps);
  }
  return g;
}

inline std::string point_text(const Point3& p) {
  return format_double(p.x()) + "," + format_double(p.y()) + "," + format_double(p.z());
}

inline std::string ext_point_text(const ExtPoint& x) {
  return x.is_infinite() ? std::string("inf") : point_text(x.point());
}

/// Runs one invocation; argv[0] is the program name.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical tools for Kleinian groups in dimension three", "kleinian"};
  app.require_subcommand(1);
  app.allow_extras(false);
  app.option_defaults()->always_capture_default();
  int threads = 1;
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  int code = kOk;
  std::function<int()> action;

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "classify one map given in a config file or as a word");
  std::string map_config, word_text, family_name = "Gp", p_text = "0,2,0";
  classify_cmd->add_option("--config", map_config, "map config (type, lambda, P, u, v)");
  classify_cmd->add_option("--family", family_name, "family for --word (Gp, Hp, Kp, L, G2D, H2D)");
  classify_cmd->add_option("--p", p_text, "family parameter x,y,z");
  classify_cmd->add_option("--word", word_text, "word in the family generators, capitals invert");
  classify_cmd->callback([&] {
    action = [&] {
      MobiusR3 f;
      if (!map_config.empty()) {
        f = map_from_config(Config::load(map_config));
      } else if (!word_text.empty()) {
        FamilyParams fp;
        fp.kind = parse_family_kind(family_name);
        fp.p = parse_point(p_text);
        const GeneratorSet g = make_family(fp);
        f = evaluate_word(g.parse(word_text), g);
      } else {
        throw Error(ErrorCode::InvalidArgument, "classify needs --config or --word");
      }
      const Classification c = classify(f);
      out << describe(f);
      out << "kind: " << to_string(c.kind) << "\n";
      out << "multiplier: " << format_double(c.lambda) << "\n";
      out << "rotation_angle: " << format_double(c.theta) << "\n";
      if (c.kind != MapKind::Identity) {
        const FixedPointSet fp = fixed_points(f);
        for (const auto& x : fp.points) out << "fixed_point: " << ext_point_text(x) << "\n";
        if (fp.locus.kind == FixedLocus::Kind::Circle)
          out << "fixed_circle: center " << point_text(fp.locus.center) << " normal "
              << point_text(fp.locus.axis) << " radius " << format_double(fp.locus.radius) << "\n";
        if (fp.locus.kind == FixedLocus::Kind::Line)
          out << "fixed_line: point " << point_text(fp.locus.center) << " direction "
              << point_text(fp.locus.axis) << "\n";
      }
      return int(kOk);
    };
  });

  // normalize
  auto* normalize_cmd = app.add_subcommand("normalize", "conjugate generators to canonical form");
  std::string group_config, kind_text;
  normalize_cmd->add_option("--config", group_config, "group config")->required();
  normalize_cmd->add_option("--kind", kind_text, "Type03, Type04, Type11 or Type102 (default from config key kind)");
  normalize_cmd->callback([&] {
    action = [&] {
      const Config c = Config::load(group_config);
      const GeneratorSet g = generators_from_config(c);
      const NormalizeKind kind = parse_normalize_kind(kind_text.empty() ? c.get("kind") : kind_text);
      const NormalizeResult r = normalize(g, kind);
      out << "kind: " << to_string(kind) << "\n";
      out << "p: " << point_text(r.p) << "\n";
      out << "mu: " << format_complex(r.mu) << "\n";
      out << "exponents:";
      for (int e : r.exponents) out << " " << e;
      out << "\nmax_deviation: " << format_double(r.max_deviation) << "\n";
      out << "conjugator:\n" << describe(r.conjugator);
      return int(kOk);
    };
  });

  // cn
  auto* cn_cmd = app.add_subcommand("cn", "evaluate the recurrence c_n(mu)");
  std::string mu_text;
  int n = 1, point_N = 200;
  cn_cmd->add_option("--mu", mu_text, "complex parameter a+bi")->required();
  cn_cmd->add_option("--n", n, "index n >= 1")->required()->check(CLI::PositiveNumber);
  cn_cmd->add_option("--N", point_N, "truncation for the membership verdict")->check(CLI::PositiveNumber);
  cn_cmd->callback([&] {
    action = [&] {
      const Complex mu = parse_complex(mu_text);
      const Complex v = c_n(mu, n);
      out << format_complex(v) << "\n";
      out << "mu: " << format_complex(mu) << "\n";
      out << "n: " << n << "\n";
      out << "abs: " << format_double(std::abs(v)) << "\n";
      const std::vector<std::function<Complex(Complex)>> closed = {
          [](Complex) { return Complex(1.0); },
          [](Complex m) { return m; },
          [](Complex m) { return m * m - 1.0; },
          [](Complex m) { return m * m * m - 2.0 * m; },
          [](Complex m) { return m * m * m * m - 3.0 * m * m + 1.0; }};
      if (n <= 5) {
        const Complex w = closed[static_cast<std::size_t>(n - 1)](mu);
        out << "closed_form: " << format_complex(w) << "\n";
        out << "closed_form_error: " << format_double(std::abs(v - w)) << "\n";
      }
      out << "membership: " << to_string(membership_p0(mu, point_N)) << "\n";
      out << "truncation_N: " << point_N << "\n";
      return int(kOk);
    };
  });

  // scan-slice
  auto* scan_cmd = app.add_subcommand("scan-slice", "scan a slice plane on a grid");
  std::string plane_text = "p0", bounds_text = "0,2,0,1", res_text = "400x200", prefix = "scan";
  double theta = 0.0;
  int scan_N = 20, search_len = 0;
  scan_cmd->add_option("--plane", plane_text, "p0, q0, r0 or rtheta");
  scan_cmd->add_option("--theta", theta, "rotation angle for rtheta");
  scan_cmd->add_option("--bounds", bounds_text, "re_min,re_max,im_min,im_max");
  scan_cmd->add_option("--res", res_text, "grid resolution WxH");
  scan_cmd->add_option("--N", scan_N, "recurrence truncation")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--search-len", search_len, "word length for the commutator search off p0");
  scan_cmd->add_option("--out", prefix, "output prefix: PREFIX.csv, PREFIX.ppm, PREFIX_overlap.pgm");
  scan_cmd->callback([&] {
    action = [&] {
      const auto b = parse_list(bounds_text);
      if (b.size() != 4 || !(b[1] > b[0]) || !(b[3] > b[2]))
        throw Error(ErrorCode::InvalidArgument, "bounds must be re_min,re_max,im_min,im_max");
      const auto [w, h] = parse_resolution(res_text);
      ScanGrid g{b[0], b[1], b[2], b[3], w, h};
      ScanOptions o;
      o.plane = parse_slice_plane(plane_text);
      o.theta = theta;
      o.N = scan_N;
      o.threads = threads;
      o.search_len = search_len;
      const ScanResult r = scan_slice(g, o);
      write_file(prefix + ".csv", encode_scan_csv(r));
      write_file(prefix + ".ppm", encode_ppm(w, h, locus_raster(r)));
      write_file(prefix + "_overlap.pgm", encode_pgm(w, h, overlap_raster(r)));
      std::size_t excluded = 0, locus = 0;
      for (const auto& c : r.cells) {
        excluded += c.verdict.excluded();
        locus += c.locus_min_n != 0;
      }
      out << "plane: " << to_string(o.plane) << "\n";
      out << "bounds: " << bounds_text << "\n";
      out << "resolution: " << w << "x" << h << "\n";
      out << "truncation_N: " << scan_N << "\n";
      out << "cells: " << r.cells.size() << "\n";
      out << "excluded_cells: " << excluded << "\n";
      out << "locus_cells: " << locus << "\n";
      out << "outputs: " << prefix << ".csv " << prefix << ".ppm " << prefix << "_overlap.pgm\n";
      return int(kOk);
    };
  });

  // shared render flags
  RenderConfig rc;
  std::string ppm_path, csv_path, ply_path;
  auto add_render_flags = [&](CLI::App* cmd) {
    cmd->add_option("--max-len", rc.max_word_len, "maximum word length")->check(CLI::NonNegativeNumber);
    cmd->add_option("--prune", rc.prune_radius, "prune radius")->check(CLI::PositiveNumber);
    cmd->add_option("--clip", rc.clip_x, "keep |x| <= clip")->check(CLI::PositiveNumber);
    cmd->add_option("--axis", rc.axis, "projection axis 0, 1 or 2")->check(CLI::Range(0, 2));
    cmd->add_option("--width", rc.width, "image width")->check(CLI::PositiveNumber);
    cmd->add_option("--height", rc.height, "image height")->check(CLI::PositiveNumber);
    cmd->add_option("--extent", rc.extent, "half-width of the view window")->check(CLI::PositiveNumber);
    cmd->add_option("--depth-min", rc.depth_min, "z at the dimmest lit value");
    cmd->add_option("--depth-max", rc.depth_max, "z at full brightness");
    cmd->add_option("--ppm", ppm_path, "image output");
    cmd->add_option("--csv", csv_path, "point or sphere list output");
  };
  auto print_render_config = [&] {
    out << "max_word_len: " << rc.max_word_len << "\n";
    out << "prune_radius: " << format_double(rc.prune_radius) << "\n";
    out << "clip_x: " << format_double(rc.clip_x) << "\n";
    out << "axis: " << rc.axis << "\n";
    out << "image: " << rc.width << "x" << rc.height << "\n";
  };

  // render-limitset
  auto* limit_cmd = app.add_subcommand("render-limitset", "sample and draw a limit set");
  std::string render_family = "Gp", render_p = "0,2.5,0";
  limit_cmd->add_option("--family", render_family, "Gp, Hp or Kp");
  limit_cmd->add_option("--p", render_p, "parameter x,y,z");
  add_render_flags(limit_cmd);
  limit_cmd->add_option("--ply", ply_path, "ascii PLY output");
  limit_cmd->callback([&] {
    action = [&] {
      FamilyParams fp;
      fp.kind = parse_family_kind(render_family);
      if (fp.kind != FamilyKind::Gp && fp.kind != FamilyKind::Hp && fp.kind != FamilyKind::Kp)
        throw Error(ErrorCode::InvalidArgument, "render-limitset supports Gp, Hp and Kp");
      fp.p = parse_point(render_p);
      rc.threads = threads;
      const PointCloud cloud = limit_points(make_family(fp), rc);
      if (!ppm_path.empty()) export_image(project_render(cloud, rc), ppm_path);
      if (!csv_path.empty()) export_points(cloud, ExportFormat::CSV, csv_path);
      if (!ply_path.empty()) export_points(cloud, ExportFormat::PLY, ply_path);
      out << "family: " << render_family << "\n";
      out << "p: " << point_text(fp.p) << "\n";
      print_render_config();
      out << "points: " << cloud.points.size() << "\n";
      return int(kOk);
    };
  });

  // render-kp
  auto* kp_cmd = app.add_subcommand("render-kp", "orbit of the plane y = 0 under K_p");
  std::string kp_p = "0,4,0";
  bool transform = false;
  kp_cmd->add_option("--p", kp_p, "parameter x,y,z");
  kp_cmd->add_flag("--transform", transform, "post-compose with 2 J^ J (x - e2) - e2");
  add_render_flags(kp_cmd);
  kp_cmd->callback([&] {
    action = [&] {
      const Point3 p = parse_point(kp_p);
      rc.threads = threads;
      rc.ball_transform = transform;
      const SphereCloud cloud = orbit_spheres_K(p, rc);
      if (!ppm_path.empty()) export_image(project_render(cloud, rc), ppm_path);
      if (!csv_path.empty()) write_file(csv_path, encode_sphere_csv(cloud, family_Kp(p).labels()));
      out << "p: " << point_text(p) << "\n";
      out << "transform: " << (transform ? "yes" : "no") << "\n";
      print_render_config();
      out << "spheres: " << cloud.spheres.size() << "\n";
      return int(kOk);
    };
  });

  // check-combination
  auto* comb_cmd = app.add_subcommand("check-combination", "check the five combination conditions");
  std::string setup = "hp", comb_p = "0,0,2.5", witness_text;
  int L = 4;
  std::size_t samples = 64;
  comb_cmd->add_option("--setup", setup, "hp or cyclic")->check(CLI::IsMember({"hp", "cyclic"}));
  comb_cmd->add_option("--p", comb_p, "parameter x,y,z");
  comb_cmd->add_option("--L", L, "truncation word length")->check(CLI::NonNegativeNumber);
  comb_cmd->add_option("--samples", samples, "boundary samples per ball")->check(CLI::PositiveNumber);
  comb_cmd->add_option("--witness", witness_text, "witness point x,y,z for condition (3), or 'search'");
  comb_cmd->callback([&] {
    action = [&] {
      const Point3 p = parse_point(comb_p);
      CombinationConfig cfg = setup == "hp" ? combination_setup_hp(p, L) : combination_setup_cyclic(p, L);
      cfg.samples = samples;
      cfg.threads = threads;
      if (witness_text == "search") cfg.witness.reset();
      else if (!witness_text.empty()) cfg.witness = parse_point(witness_text);
      const CombinationReport r = check_combination(cfg);
      out << "setup: " << setup << "\n";
      out << "p: " << point_text(p) << "\n";
      out << to_text(r);
      return r.exit_code();
    };
  });

  // check-ford
  auto* ford_cmd = app.add_subcommand("check-ford", "test membership in the truncated Ford domain");
  std::string ford_group = "A", ford_p = "0,0,3", x_text;
  int ford_L = 4;
  ford_cmd->add_option("--group", ford_group, "A for <A_p>, or a family name");
  ford_cmd->add_option("--p", ford_p, "parameter x,y,z");
  ford_cmd->add_option("--x", x_text, "point x,y,z or inf")->required();
  ford_cmd->add_option("--L", ford_L, "truncation word length")->check(CLI::PositiveNumber);
  ford_cmd->callback([&] {
    action = [&] {
      const Point3 p = parse_point(ford_p);
      GeneratorSet g;
      if (ford_group == "A") {
        g = GeneratorSet("<A_p>", {"a"}, {map_A(p)});
      } else {
        FamilyParams fp;
        fp.kind = parse_family_kind(ford_group);
        fp.p = p;
        g = make_family(fp);
      }
      const ExtPoint x = x_text == "inf" ? ExtPoint::infinity() : ExtPoint(parse_point(x_text));
      const FordResult r = ford_membership(x, g, ford_L);
      out << "group: " << ford_group << "\n";
      out << "x: " << ext_point_text(x) << "\n";
      out << "truncation_L: " << ford_L << "\n";
      out << "inside: " << (r.inside ? "yes" : "no") << "\n";
      if (!r.inside) out << "violating_word: " << r.violating << "\n";
      return int(r.inside ? kOk : kCheckFailed);
    };
  });

  // check-hexahedron
  auto* hex_cmd = app.add_subcommand("check-hexahedron", "measure the hexahedron and its face pairings");
  double q = 4.0;
  hex_cmd->add_option("--q", q, "height q > 2");
  hex_cmd->callback([&] {
    action = [&] {
      const HexahedronReport r = hexahedron_check(q);
      out << to_text(r);
      return int(r.pass ? kOk : kCheckFailed);
    };
  });

  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
    sub->allow_extras(false);
    sub->fallthrough();
  }

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, ee;
    const int rc_parse = app.exit(e, o, ee);
    out << o.str();
    err << ee.str();
    return rc_parse == 0 ? int(kOk) : int(kUsage);
  }
  try {
    code = action ? action() : int(kUsage);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return code;
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace kleinian::cli
