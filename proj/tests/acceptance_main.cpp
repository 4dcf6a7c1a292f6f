#include <iostream>

#include "kantor/acceptance.hpp"

int main() {
    bool ok = kantor::run_acceptance(std::cout);
    return ok ? 0 : 1;
}
