namespace Shop.Core;

public static class Pricing
{
    public static decimal Round(decimal v) => Math.Round(v, 2);

    public static decimal WithTax(decimal v)
    {
        return Round(v * 1.2m);
    }
}
