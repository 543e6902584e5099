from gapkit.cli import main

raise SystemExit(main())
