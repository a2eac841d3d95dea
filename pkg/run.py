import os

from dotenv import load_dotenv

from erdlab import configure_logging
from erdlab.config import load_config
from erdlab.driver import Driver

# Load environment variables
load_dotenv()


# Oracle-only pass, no training
# config = load_config("configs/default.conf", out_dir="runs/oracle")
# Driver(config, oracle_only=True).run()


config = load_config(os.environ.get("ERDLAB_CONFIG", "configs/default.conf"), plot=True)
configure_logging(os.path.join(config.out_dir, "logs"), os.environ.get("ERDLAB_LOG_LEVEL", "INFO"))
Driver(config).run()
