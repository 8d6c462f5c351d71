from heatnet.cli import main

# Equivalent to the installed ``heatnet`` script
if __name__ == "__main__":
    raise SystemExit(main())
