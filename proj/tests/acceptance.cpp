// Runs the nine acceptance checks and prints one PASS/FAIL line for each.
// Exit status is nonzero if any check fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "test_support.hpp"

using namespace kleinian;
using namespace kleinian::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Mat3 diag(Complex a, Complex b, Complex c) {
  Mat3 m = Mat3::Zero();
  m.diagonal() << a, b, c;
  return m;
}

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("kleinian_acceptance_" + name)).string();
}

std::string slurp(const std::string& path) {
  try {
    return io::read_file(path);
  } catch (const Error&) {
    return {};
  }
}

std::string group_file() {
  static const std::string path = [] {
    const std::string p = temp_path("example_group.json");
    io::write_file(p, io::dump(io::to_json(example_group())));
    return p;
  }();
  return path;
}

Outcome example_reproduction() {
  Outcome o;
  const auto t0 = Clock::now();
  std::ostringstream out, err;
  const int code = cli::limit_set(group_file(), 4, "", out, err);
  const double elapsed = seconds_since(t0);
  o.require(code == cli::kOk, "limit-set exit code " + std::to_string(code) + ": " + err.str());
  if (!o.ok) return o;
  const io::Json j = io::parse_json_text(out.str());
  const io::Json& lines = j["accumulation"]["lines"];
  o.require(lines.size() == 3, std::to_string(lines.size()) + " accumulation lines");
  for (int i = 0; i < 3 && o.ok; ++i) {
    bool found = false;
    for (const io::Json& l : lines) {
      Vec3 v;
      for (int k = 0; k < 3; ++k) v[k] = io::parse_complex(l["dual_coords"][k]);
      found = found || chordal_dist(ProjLine(v), basis_line(i)) <= 1e-9;
    }
    o.require(found, "coordinate line " + std::to_string(i + 1) + " missing");
  }
  const io::Json& d = j["diagnostics"];
  o.require(d["global_fixed_point"].is_null(), "global fixed point reported");
  o.require(d["invariant_line"].is_null(), "invariant line reported");
  o.require(d["discreteness"]["verdict"] == "NoWitness", "discreteness verdict is not NoWitness");
  o.require(d["gp3"].get<bool>(), "gp3 false");
  o.require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  if (o.ok) o.detail = "3 coordinate lines in " + std::to_string(elapsed) + " s";
  return o;
}

Outcome classification_table() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(1001);
  int checked = 0;
  for (const Canonical& rep : canonical_representatives()) {
    try {
      const ElementClass c = classify(GroupElement(rep.matrix));
      o.require(c.kind == rep.kind, std::string(rep.name) + " classified as " + to_string(c.kind));
      for (int i = 0; i < 200; ++i) {
        const Mat3 h = random_well_conditioned(rng, 1e4);
        const ElementKind k = classify(GroupElement(conjugate(h, rep.matrix))).kind;
        o.require(k == rep.kind, std::string(rep.name) + " conjugate classified as " + to_string(k));
        ++checked;
      }
    } catch (const Error& e) {
      o.require(false, std::string(rep.name) + ": " + e.what());
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  if (o.ok) {
    o.detail = "8 representatives, " + std::to_string(checked) + " conjugates, " +
               std::to_string(elapsed) + " s";
  }
  return o;
}

bool dimension_identity(const PseudoProjMap& s) {
  return s.rank() == 3 || s.kernel().dimension() + s.image().dimension() == 1;
}

Outcome pseudo_projective_duality() {
  Outcome o;
  Rng rng(1002);
  int rank_deficient = 0;
  for (ElementKind kind : {ElementKind::StronglyLoxodromic, ElementKind::Loxoparabolic}) {
    for (int i = 0; i < 500 && o.ok; ++i) {
      const GroupElement g(conjugate(random_well_conditioned(rng, 10), jordan_form(kind, rng)));
      // Loxoparabolic powers approach their limit at rate 1/n, so the
      // sequence is sampled along n = 2^k.
      const bool slow = kind == ElementKind::Loxoparabolic;
      const SequenceLimit s = limit_of_sequence(
          slow ? dyadic_power_sequence(g) : power_sequence(g), 400);
      const SequenceLimit t = inverse_limit(slow ? dyadic_power_sequence(g) : power_sequence(g), 400);
      o.require(s.limit && t.limit, std::string("no limit within 400 terms for ") + to_string(kind));
      if (!o.ok) break;
      for (const PseudoProjMap* m : {&*s.limit, &*t.limit}) {
        o.require(m->rank() < 3, "limit is invertible");
        o.require(dimension_identity(*m), "dim Ker + dim Im != 1");
        ++rank_deficient;
      }
      if (s.limit->rank() == 1) {
        o.require(same_subspace(s.limit->image(), t.limit->kernel(), 1e-7) ||
                      contained_in(s.limit->image(), t.limit->kernel(), 1e-7),
                  "Im(S) is not in Ker(T)");
        o.require(contained_in(t.limit->image(), s.limit->kernel(), 1e-7),
                  "Im(T) is not in Ker(S)");
      } else {
        o.require(same_subspace(s.limit->image(), t.limit->kernel(), 1e-7),
                  "Im(S) != Ker(T)");
        o.require(same_subspace(s.limit->kernel(), t.limit->image(), 1e-7),
                  "Ker(S) != Im(T)");
      }
    }
  }
  if (o.ok) o.detail = "1000 elements, " + std::to_string(rank_deficient) + " limit maps";
  return o;
}

Outcome line_collapse() {
  Outcome o;
  Rng rng(1003);
  double worst = 0.0;
  for (int i = 0; i < 200 && o.ok; ++i) {
    const GroupElement g(conjugate(random_well_conditioned(rng, 10),
                                   jordan_form(ElementKind::StronglyLoxodromic, rng)));
    const SequenceLimit s = limit_of_sequence(power_sequence(g), 400);
    o.require(s.limit.has_value(), "forward limit missing");
    if (!o.ok) break;
    ProjLine l = random_line(rng);
    while (incidence_residual(s.limit->image().point, l) <= 1e-3) l = random_line(rng);
    const double r = line_collapse_check(power_sequence(g), l, *s.limit, 300);
    worst = std::max(worst, r);
    o.require(r < 1e-5, "residual " + std::to_string(r));
  }
  if (o.ok) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "200 pairs, worst residual %.3g", worst);
    o.detail = buf;
  }
  return o;
}

Outcome unipotent_power_formula() {
  Outcome o;
  using IM = Eigen::Matrix<long long, 3, 3>;
  IM u = IM::Identity();
  u(0, 1) = u(1, 2) = 1;
  IM inv = IM::Identity();
  inv(0, 1) = inv(1, 2) = -1;
  inv(0, 2) = 1;
  o.require(u * inv == IM::Identity(), "integer inverse is wrong");
  IM forward = IM::Identity(), backward = IM::Identity();
  o.require(power_matrix_closed_form(u, 0) == IM::Identity(), "n = 0");
  for (int n = 1; n <= 30 && o.ok; ++n) {
    forward = forward * u;
    backward = backward * inv;
    o.require(power_matrix_closed_form(u, n) == forward, "n = " + std::to_string(n));
    o.require(power_matrix_closed_form(u, -n) == backward, "n = -" + std::to_string(n));
    o.require(forward(0, 2) == static_cast<long long>(n) * (n - 1) / 2,
              "corner entry at n = " + std::to_string(n));
  }
  if (o.ok) o.detail = "exact for |n| <= 30";
  return o;
}

Outcome cyclic_invariances() {
  Outcome o;
  Rng rng(1006);
  int checked = 0;
  for (ElementKind kind : non_elliptic_kinds()) {
    for (int i = 0; i < 100 && o.ok; ++i) {
      const GroupElement g(conjugate(random_well_conditioned(rng, 100), jordan_form(kind, rng)));
      try {
        const LimitSetDesc d = limit_set_cyclic(g);
        o.require(same_limit_set(d, limit_set_cyclic(g.inverse()), 1e-8),
                  std::string(to_string(kind)) + ": inverse");
        for (int k = 2; k <= 5; ++k) {
          o.require(same_limit_set(d, limit_set_cyclic(power(g, k)), 1e-8),
                    std::string(to_string(kind)) + ": power " + std::to_string(k));
        }
        ++checked;
      } catch (const Error& e) {
        o.require(false, std::string(to_string(kind)) + ": " + e.what());
      }
    }
  }
  if (o.ok) o.detail = std::to_string(checked) + " elements over 7 kinds";
  return o;
}

Outcome attracting_line_lemma() {
  Outcome o;
  Rng rng(1007);
  const Complex zeta = std::polar(1.0, 2.0 * std::numbers::pi / 5.0);
  struct Case {
    std::string name;
    Mat3 m;
    ProjLine forward;  // expected forward limit
    // Lines excluded as the pencil exception of the forward orbit.
    std::function<bool(const Vec3&)> exceptional;
  };
  Mat3 a = Mat3::Identity();
  a(0, 1) = 1.0;
  Mat3 b = diag(zeta, zeta, 1.0 / (zeta * zeta));
  b(0, 1) = 1.0;
  Mat3 c = Mat3::Identity();
  c(0, 1) = c(1, 2) = 1.0;
  Mat3 d = diag(2, 2, 0.25);
  d(0, 1) = 1.0;
  const std::vector<Case> cases{
      {"(a)", a, basis_line(1), [](const Vec3& v) { return std::abs(v[0]) < 1e-3; }},
      {"(b)", b, basis_line(1), [](const Vec3& v) { return std::abs(v[0]) < 1e-3; }},
      {"(c)", c, basis_line(2), [](const Vec3&) { return false; }},
      {"(d)", d, basis_line(2), [](const Vec3& v) { return std::abs(v[2]) < 1e-3; }},
  };
  for (const Case& k : cases) {
    const GroupElement g(k.m);
    const LimitSetDesc lambda = limit_set_cyclic(g);
    int done = 0;
    while (done < 50 && o.ok) {
      const ProjLine l = random_line(rng);
      if (k.exceptional(l.coords())) continue;
      ++done;
      try {
        const AttractingLines r = attracting_line_probe(g, l);
        o.require(r.hits_limit_set, k.name + ": no limit in the limit set");
        o.require(r.forward && chordal_dist(*r.forward, k.forward) <= 1e-7,
                  k.name + ": forward limit differs");
        const bool in_lambda =
            std::any_of(lambda.lines.begin(), lambda.lines.end(),
                        [&](const ProjLine& x) { return chordal_dist(x, *r.forward) <= 1e-7; });
        o.require(in_lambda, k.name + ": forward limit outside the cyclic limit set");
      } catch (const Error& e) {
        o.require(false, k.name + ": " + e.what());
      }
    }
  }
  if (o.ok) o.detail = "4 cases x 50 lines";
  return o;
}

Outcome exact_ball_count() {
  Outcome o;
  const GroupPresentation g = example_group();
  const WordBall ball = enumerate_ball(g, 3);
  const std::set<Monomial> want = monomial_ball(3);
  std::set<Monomial> got;
  for (const GroupElement& e : ball.elements) {
    const auto x = decode_monomial(e.matrix());
    o.require(x.has_value(), "element " + g.spell(e.word()) + " is not monomial");
    if (!x) break;
    o.require(got.insert(*x).second, "duplicate element " + g.spell(e.word()));
  }
  o.require(got == want, std::to_string(got.size()) + " elements, oracle has " +
                             std::to_string(want.size()));
  if (o.ok) o.detail = std::to_string(got.size()) + " elements match the exact enumerator";
  return o;
}

Outcome determinism() {
  Outcome o;
  std::string reports[2], images[2], sidecars[2];
  for (int run = 0; run < 2; ++run) {
    std::ostringstream out, err;
    o.require(cli::limit_set(group_file(), 4, "", out, err) == cli::kOk, "limit-set failed");
    reports[run] = out.str();
    cli::RenderArgs args;
    args.file = group_file();
    args.radius = 4;
    args.spec.width = 128;
    args.spec.height = 96;
    args.spec.output = temp_path("render_" + std::to_string(run) + ".ppm");
    o.require(cli::render(args, err) == cli::kOk, "render failed: " + err.str());
    images[run] = slurp(args.spec.output);
    sidecars[run] = slurp(args.spec.output + ".json");
    std::filesystem::remove(args.spec.output);
    std::filesystem::remove(args.spec.output + ".json");
  }
  o.require(!reports[0].empty() && reports[0] == reports[1], "limit-set reports differ");
  o.require(!images[0].empty() && images[0] == images[1], "pixmaps differ");
  o.require(!sidecars[0].empty() && sidecars[0] == sidecars[1], "render sidecars differ");
  if (o.ok) {
    o.detail = "JSON " + std::to_string(reports[0].size()) + " bytes, pixmap " +
               std::to_string(images[0].size()) + " bytes, identical";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 example reproduction", example_reproduction},
      {"2 classification table", classification_table},
      {"3 pseudo-projective duality", pseudo_projective_duality},
      {"4 line collapse", line_collapse},
      {"5 unipotent power formula", unipotent_power_formula},
      {"6 cyclic limit invariances", cyclic_invariances},
      {"7 attracting-line probe", attracting_line_lemma},
      {"8 exact-oracle ball count", exact_ball_count},
      {"9 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.ok) ++failures;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::filesystem::remove(group_file());
  return failures == 0 ? 0 : 1;
}
