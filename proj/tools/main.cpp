#include <cstdio>
int main(){ std::puts("slowobs"); return 0; }
