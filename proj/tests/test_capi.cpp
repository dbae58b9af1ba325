#include "nbrw.h"
int main(){return 0;}
