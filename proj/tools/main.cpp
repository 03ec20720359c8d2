#include "app/commands.hpp"

int main(int argc, char** argv) { return lrbms::app::run_cli(argc, argv); }
