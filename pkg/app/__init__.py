# Group theory toolkit for small Mealy automata
