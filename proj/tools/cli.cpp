// command line front end; subcommands fill in as the library lands
#include <CLI11.hpp>
#include <cstdio>

#include <cgoslab/version.hpp>

int main(int argc, char** argv) {
    CLI::App app{"constructive uniqueness toolkit for slab scattering data"};
    app.set_version_flag("--version", cgoslab::version_string);
    app.require_subcommand(0, 1);
    CLI11_PARSE(app, argc, argv);
    std::puts("no subcommand given; try --help");
    return 0;
}
