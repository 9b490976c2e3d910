#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"locally convex spherical curve toolkit"};
  app.require_subcommand(0);
  CLI11_PARSE(app, argc, argv);
  return 0;
}
