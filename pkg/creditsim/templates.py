class Messages:
    TITLE = "creditsim"
    DESCRIPTION = (
        "Discrete-event simulator of a credit-based hypervisor scheduler and of VMs that "
        "steal CPU time by sleeping through its sampling tick, with four charging schemes "
        "that close the gap."
    )
    CLI_EPILOG = (
        "Exit codes: 0 success, 1 usage or scenario error, 2 simulation failure. "
        "SIM_SEED sets the default seed."
    )

    RUN_HELP = "Run a scenario file or preset and print or write its report."
    SWEEP_HELP = "Run a scenario once per value of one numeric field."
    PRESET_HELP = "Run a built-in preset, including its sweep if it defines one."
    VALIDATE_HELP = "Check a scenario file without running it."
    LIST_HELP = "List the built-in presets."

    SCENARIO_VALID = "{source}: valid, {vms} VM(s) on {pcpus} PCPU(s), schedulers: {schedulers}."
    SWEEP_NEEDS_VALUES = "sweep needs --param and --values, or a [sweep] section in the scenario."
    SIMULATION_FAILED = "Simulation failed:"

    DASHBOARD_INFO = (
        "Runs are batch runs: pick a scenario, start it, and read the tables once every "
        "replica has finished."
    )
    EDITOR_INFO = "Scenario text in the `key = value` format. Validate before running."
    VIEWER_INFO = "Upload a JSON report written with `--format json`."
    NO_PRESETS = "No presets were found in {directory}."
    RUN_FINISHED = "Simulated {replicas} replica(s) of {schedulers} scheduler(s) in {seconds:.1f} s."
    SWEEP_FINISHED = "Simulated {points} sweep point(s) of {param} in {seconds:.1f} s."
    PRESET_SWEEP = "This preset sweeps `{param}` over {values}; every point is run."
