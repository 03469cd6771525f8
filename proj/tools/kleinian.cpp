#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kleinian/kleinian.hpp"

namespace cli = kleinian::cli;

int main(int argc, char** argv) {
  CLI::App app{"Limit sets of complex Kleinian groups in P2"};
  app.require_subcommand(1);

  std::string file;
  std::string out_path, csv_path;
  int radius = 4;

  auto* classify = app.add_subcommand("classify", "classify one matrix");
  classify->add_option("file", file, "matrix JSON file")->required();

  auto* limit = app.add_subcommand("limit-set", "accumulation lines and diagnostics");
  limit->add_option("file", file, "group JSON file")->required();
  limit->add_option("--radius", radius, "word ball radius (1..12)");
  limit->add_option("--out", out_path, "write the report here instead of stdout");
  limit->add_option("--csv", csv_path, "also write the accumulation lines as CSV");

  cli::RenderArgs render_args;
  std::string slice = "re1,re2", size = "256x256", range, offset;
  auto* render = app.add_subcommand("render", "rasterize a slice of the limit set");
  render->add_option("file", render_args.file, "group JSON file")->required();
  render->add_option("--radius", render_args.radius, "word ball radius (1..12)");
  render->add_option("--chart", render_args.spec.chart, "coordinate set to 1 (1, 2 or 3)");
  render->add_option("--slice", slice, "two of re1, im1, re2, im2");
  render->add_option("--size", size, "WxH in pixels");
  render->add_option("--scale", render_args.spec.distance_scale, "distance scale");
  render->add_option("--range", range, "xmin,xmax,ymin,ymax");
  render->add_option("--offset", offset, "slice origin as re1,im1,re2,im2");
  render->add_option("--out", render_args.spec.output, "output .ppm path")->required();

  std::string word, mode = "linear";
  int terms = 400;
  auto* pseudo = app.add_subcommand("pseudo-limit", "limits of powers of a word");
  pseudo->add_option("file", file, "group JSON file")->required();
  pseudo->add_option("--word", word, "word such as \"A B^-1\"")->required();
  pseudo->add_option("--terms", terms, "term budget");
  pseudo->add_option("--mode", mode, "linear (all powers) or dyadic (powers 2^k)");

  int verify_radius = 4;
  bool perturb = false;
  auto* verify = app.add_subcommand("verify-example", "check the built-in example group");
  verify->add_option("--radius", verify_radius, "word ball radius (0..12)");
  verify->add_flag("--perturb", perturb, "use A = diag(0.5001, 1, 2), report only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kBadInput;
  }

  if (*classify) return cli::classify_file(file, std::cout, std::cerr);
  if (*limit) return cli::limit_set(file, radius, out_path, std::cout, std::cerr, csv_path);
  if (*pseudo) return cli::pseudo_limit(file, word, terms, mode, std::cout, std::cerr);
  if (*verify) return cli::verify_example(verify_radius, perturb, std::cout, std::cerr);
  if (*render) {
    try {
      cli::parse_slice(slice, render_args.spec);
      cli::parse_size(size, render_args.spec);
      if (!range.empty()) {
        const auto r = cli::parse_reals(range, 4);
        render_args.spec.xmin = r[0];
        render_args.spec.xmax = r[1];
        render_args.spec.ymin = r[2];
        render_args.spec.ymax = r[3];
      }
      if (!offset.empty()) {
        const auto o = cli::parse_reals(offset, 4);
        std::copy(o.begin(), o.end(), render_args.spec.offset.begin());
      }
    } catch (const kleinian::Error& e) {
      std::cerr << e.what() << "\n";
      return cli::kBadInput;
    }
    return cli::render(render_args, std::cerr);
  }
  return cli::kBadInput;
}
