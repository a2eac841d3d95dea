from erdlab.cli import run

run()
