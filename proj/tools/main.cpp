#include <iostream>

int main() {
    std::cout << "limpet: pipeline not wired yet\n";
    return 0;
}
