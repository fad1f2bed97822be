from jcells.cli import main

main()
