#include "rgan/cli/app.hpp"

int main(int argc, char** argv)
{
    return rgan::cli::run(argc, argv);
}
