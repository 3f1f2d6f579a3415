3 8
a b c
000
100
010
110
001
101
011
111
