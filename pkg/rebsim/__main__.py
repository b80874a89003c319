from rebsim.main import main

raise SystemExit(main())
