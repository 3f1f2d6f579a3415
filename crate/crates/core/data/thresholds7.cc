7 8
1 2 3 4 5 6 7
0000000
1000000
1100000
1110000
1111000
1111100
1111110
1111111
