// subfock: validate, analyze and factor covariant representations of
// truncated subproduct systems from JSON problem descriptors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "subfock/cli.hpp"

namespace {

std::vector<subfock::CurvatureMethod> parse_methods(const std::string& list) {
  std::vector<subfock::CurvatureMethod> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "direct")
      out.push_back(subfock::CurvatureMethod::direct);
    else if (item == "closed" || item == "closed_form")
      out.push_back(subfock::CurvatureMethod::closed_form);
    else if (item == "poisson")
      out.push_back(subfock::CurvatureMethod::poisson);
    else if (item == "complement")
      out.push_back(subfock::CurvatureMethod::complement);
    else
      throw subfock::ParseError("unknown curvature method: " + item);
  }
  if (out.empty()) throw subfock::ParseError("--method: empty method list");
  return out;
}

int run(const std::string& command, const std::string& path,
        const subfock::CliOptions& options) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "subfock: cannot open " << path << "\n";
    return subfock::kExitInputError;
  }
  subfock::Json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    std::cerr << "subfock: JSON parse error: " << e.what() << "\n";
    return subfock::kExitInputError;
  }

  subfock::Json report;
  int code = subfock::kExitInputError;
  try {
    const subfock::ProblemDescriptor descriptor =
        subfock::parse_descriptor(doc);
    if (command == "validate")
      code = subfock::cmd_validate(descriptor, options, report);
    else if (command == "analyze")
      code = subfock::cmd_analyze(descriptor, options, report);
    else
      code = subfock::cmd_factor(descriptor, options, report);
  } catch (const subfock::ParseError& e) {
    std::cerr << "subfock: " << e.what() << "\n";
    return subfock::kExitInputError;
  } catch (const subfock::DegreeOutOfRange& e) {
    std::cerr << "subfock: " << e.what() << "\n";
    return subfock::kExitInputError;
  } catch (const subfock::NotPSD& e) {
    std::cerr << "subfock: " << e.what() << "\n";
    return subfock::kExitNumericalFailure;
  } catch (const subfock::Error& e) {
    std::cerr << "subfock: " << e.what() << "\n";
    return subfock::kExitValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "subfock: " << e.what() << "\n";
    return subfock::kExitInputError;
  }
  std::cout << report.dump(2) << "\n";
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated subproduct systems: covariant representations, "
               "Poisson kernels, factorizations and curvature"};
  app.require_subcommand(1);

  std::string file;
  std::string methods = "direct,closed,poisson,complement";
  bool shift = false;
  double tol = -1.0;
  long long kmax = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", file, "problem descriptor (JSON)")->required();
    sub->add_option("--method", methods,
                    "comma-separated curvature methods "
                    "(direct,closed,poisson,complement)");
    sub->add_flag("--shift", shift,
                  "use the induced shift S (x) I_r instead of explicit "
                  "operators");
    sub->add_option("--tol", tol, "override options.tol");
    sub->add_option("--kmax", kmax, "override options.k_max");
  };

  CLI::App* validate = app.add_subcommand("validate", "check system and "
                                                      "representation");
  CLI::App* analyze = app.add_subcommand(
      "analyze", "purity, defect, Poisson residuals and curvature");
  CLI::App* factor =
      app.add_subcommand("factor", "factorize an invariant subspace");
  add_common(validate);
  add_common(analyze);
  add_common(factor);

  CLI11_PARSE(app, argc, argv);

  subfock::CliOptions options;
  options.shift_mode = shift;
  if (tol > 0.0) options.tol = tol;
  if (kmax > 0) options.k_max = static_cast<subfock::Index>(kmax);
  try {
    options.methods = parse_methods(methods);
  } catch (const subfock::ParseError& e) {
    std::cerr << "subfock: " << e.what() << "\n";
    return subfock::kExitInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return run(command, file, options);
}
