from util.ruleforge_cli import RuleForgeCli
import sys


def main() -> int:
    return RuleForgeCli().dispatch(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
