#include <iostream>

#include "CLI11.hpp"
#include "t2veval/fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic 12-prompt fixture: videos, references, scene table, config, ratings, study"};
  std::filesystem::path root;
  t2veval::FixtureOptions opts;
  app.add_option("root", root)->required();
  app.add_option("--models", opts.models, "Model ids, best first");
  app.add_option("--width", opts.width);
  app.add_option("--height", opts.height);
  app.add_option("--frames", opts.frames);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }
  try {
    t2veval::write_fixture(root, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << root.string() << "\n";
  return 0;
}
