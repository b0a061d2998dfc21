#include <cstdio>
int main(){ std::puts("wkbdet"); return 0; }
