#include <hankelmc/cli.hpp>

int main(int argc, char** argv)
{
    return hankelmc::cli_main(argc, argv);
}
